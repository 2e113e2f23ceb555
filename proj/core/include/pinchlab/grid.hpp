#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace pinchlab {

// Uniform radial grid r_i = r_min + i*step, i = 0..n-1.
struct RadialGrid {
  double r_min = 0.0;
  double step = 1e-3;
  std::size_t n = 0;

  static RadialGrid over(double r_min, double r_max, double step);

  double r(std::size_t i) const { return r_min + static_cast<double>(i) * step; }
  double r_max() const { return r(n - 1); }
  std::vector<double> nodes() const;
  std::size_t nearest(double r) const;
  bool same_as(const RadialGrid& o) const;
};

// Finite-difference stencil at one node: value f'(r_i) ~ sum w_k f(r_{first+k}).
struct Stencil {
  std::size_t first = 0;
  std::size_t count = 0;
  std::array<double, 5> w{};
};

// Fourth-order central in the interior, second-order central next to the
// ends, second-order one-sided at the ends.
Stencil d1_stencil(std::size_t i, std::size_t n, double h);
Stencil d2_stencil(std::size_t i, std::size_t n, double h);

std::vector<double> d1(const std::vector<double>& f, double h);
std::vector<double> d2(const std::vector<double>& f, double h);

// Composite Simpson over f sampled on [i0, i1] (inclusive); an odd
// number of panels closes with the 3/8 rule.
double simpson(const std::vector<double>& f, std::size_t i0, std::size_t i1, double h);
double simpson(const std::vector<double>& f, double h);

}  // namespace pinchlab
