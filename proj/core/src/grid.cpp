#include "pinchlab/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pinchlab/errors.hpp"

namespace pinchlab {

RadialGrid RadialGrid::over(double r_min, double r_max, double step) {
  if (!(step > 0.0) || !(r_max > r_min)) throw DomainError("grid: need r_max > r_min and step > 0");
  RadialGrid g;
  g.r_min = r_min;
  g.step = step;
  g.n = static_cast<std::size_t>(std::llround((r_max - r_min) / step)) + 1;
  return g;
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = r(i);
  return out;
}

std::size_t RadialGrid::nearest(double rr) const {
  double k = std::round((rr - r_min) / step);
  k = std::clamp(k, 0.0, static_cast<double>(n - 1));
  return static_cast<std::size_t>(k);
}

bool RadialGrid::same_as(const RadialGrid& o) const {
  return n == o.n && std::abs(step - o.step) <= 1e-14 * step &&
         std::abs(r_min - o.r_min) <= 1e-12 * (1.0 + std::abs(r_min));
}

Stencil d1_stencil(std::size_t i, std::size_t n, double h) {
  if (n < 5) throw ResolutionError("finite differences need at least 5 grid points");
  Stencil s;
  if (i == 0) {
    s = {0, 3, {-1.5, 2.0, -0.5}};
  } else if (i == n - 1) {
    s = {n - 3, 3, {0.5, -2.0, 1.5}};
  } else if (i == 1 || i == n - 2) {
    s = {i - 1, 3, {-0.5, 0.0, 0.5}};
  } else {
    s = {i - 2, 5, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12}};
  }
  for (auto& w : s.w) w /= h;
  return s;
}

Stencil d2_stencil(std::size_t i, std::size_t n, double h) {
  if (n < 5) throw ResolutionError("finite differences need at least 5 grid points");
  Stencil s;
  if (i == 0) {
    s = {0, 4, {2.0, -5.0, 4.0, -1.0}};
  } else if (i == n - 1) {
    s = {n - 4, 4, {-1.0, 4.0, -5.0, 2.0}};
  } else if (i == 1 || i == n - 2) {
    s = {i - 1, 3, {1.0, -2.0, 1.0}};
  } else {
    s = {i - 2, 5, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}};
  }
  for (auto& w : s.w) w /= h * h;
  return s;
}

namespace {
template <class F>
std::vector<double> apply(const std::vector<double>& f, double h, F stencil) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stencil s = stencil(i, n, h);
    // weights sum to zero; differencing against f_i keeps constants exact
    double acc = 0.0;
    for (std::size_t k = 0; k < s.count; ++k) acc += s.w[k] * (f[s.first + k] - f[i]);
    out[i] = acc;
  }
  return out;
}
}  // namespace

std::vector<double> d1(const std::vector<double>& f, double h) { return apply(f, h, d1_stencil); }
std::vector<double> d2(const std::vector<double>& f, double h) { return apply(f, h, d2_stencil); }

double simpson(const std::vector<double>& f, std::size_t i0, std::size_t i1, double h) {
  if (i1 <= i0) return 0.0;
  std::size_t panels = i1 - i0;
  if (panels == 1) return 0.5 * h * (f[i0] + f[i1]);
  double acc = 0.0;
  std::size_t end = i1;
  if (panels % 2 == 1) {
    // 3/8 rule on the last three panels
    end = i1 - 3;
    acc += 3.0 * h / 8.0 * (f[end] + 3.0 * f[end + 1] + 3.0 * f[end + 2] + f[i1]);
  }
  if (end > i0) {
    double s = f[i0] + f[end];
    for (std::size_t i = i0 + 1; i < end; ++i) s += (((i - i0) % 2) ? 4.0 : 2.0) * f[i];
    acc += s * h / 3.0;
  }
  return acc;
}

double simpson(const std::vector<double>& f, double h) {
  if (f.empty()) return 0.0;
  return simpson(f, 0, f.size() - 1, h);
}

}  // namespace pinchlab
