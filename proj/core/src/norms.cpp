#include <algorithm>
#include <cmath>

#include "pinchlab/errors.hpp"
#include "pinchlab/geometry.hpp"
#include "pinchlab/grid.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/solver.hpp"

namespace pinchlab {

double SmallPartWindow::depth(double r) const {
  switch (kind) {
    case Kind::cusp:
      return r - boundary_r;
    case Kind::tube:
      return boundary_r - r;
    case Kind::none:
      break;
  }
  return -1.0;
}

double SmallPartWindow::weight(double r, double lambda) const {
  double d = depth(r);
  if (kind == Kind::none || d < 0.0) return 1.0;
  if (kind == Kind::cusp) return std::exp(-lambda * d);
  return std::exp(-lambda * d) + std::exp(lambda * (d - boundary_r));
}

double SmallPartWindow::cutoff(double r) const {
  static const CutoffProfile sigma;
  double d = depth(r);
  if (kind == Kind::none) return 0.0;
  if (kind == Kind::cusp) return sigma.value(-d);
  // 1 at distance in [5/4, R - 1/4] from the core, 0 within distance 1 and outside
  return sigma.value(-4.0 * d) * sigma.value(-4.0 * (boundary_r - d - 1.0));
}

double SmallPartWindow::projection_radius(double r_lo, double r_hi) const {
  switch (kind) {
    case Kind::cusp:
      return r_hi;
    case Kind::tube:
      return std::clamp(0.5 * boundary_r, r_lo, r_hi);
    case Kind::none:
      break;
  }
  return 0.5 * (r_lo + r_hi);
}

void NormConfig::validate() const {
  if (n < 3) throw DomainError("norm config: n must be at least 3");
  double top = 2.0 * std::sqrt(static_cast<double>(n - 2));
  if (!(delta > 0.0 && delta < top)) throw DomainError("norm config: delta must lie in (0, 2 sqrt(n-2))");
  if (!(r0 >= 1.0)) throw DomainError("norm config: r0 must be at least 1");
  if (!(eps_bar > 0.0)) throw DomainError("norm config: eps_bar must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("norm config: lambda must lie in (0, 1)");
  if (!(b > 1.0)) throw DomainError("norm config: b must exceed 1");
  if (!(eta >= 2.0 + lambda)) throw DomainError("norm config: eta must be at least 2 + lambda");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("norm config: alpha must lie in (0, 1)");
  if (!(section_area > 0.0)) throw DomainError("norm config: section area must be positive");
  if (basepoint_stride == 0) throw DomainError("norm config: basepoint stride must be positive");
}

PointwiseNorms pointwise_norms(const SymRadialTensor& h, const WarpedMetric& metric) {
  if (!h.grid.same_as(metric.grid)) throw GridMismatch("pointwise_norms: grids differ");
  const std::size_t n = metric.grid.n;
  auto jets = frame_jets(h, metric);
  PointwiseNorms out;
  out.h.resize(n);
  out.grad.resize(n);
  out.hess.resize(n);
  out.lap.resize(n);
  out.hess_frame.resize(n);
  parallel_for(n, [&](std::size_t i) {
    PointGeometry p = point_geometry(metric.jet(i));
    CovariantJet cj = covariant_jet(p, jets[i]);
    Vec3 w = metric.frame_weights(i);
    double g2 = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double v = cj.nabla[c](a, b) / (w(c) * w(a) * w(b));
          g2 += v * v;
        }
    Eigen::VectorXd hf(81);
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            hf(((c * 3 + d) * 3 + a) * 3 + b) = cj.hessian[c][d](a, b) / (w(c) * w(d) * w(a) * w(b));
    Mat3 lap = cj.rough_laplacian;
    double l2 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double v = lap(a, b) / (w(a) * w(b));
        l2 += v * v;
      }
    out.h[i] = h.norm_at(i);
    out.grad[i] = std::sqrt(g2);
    out.hess[i] = hf.norm();
    out.lap[i] = std::sqrt(l2);
    out.hess_frame[i] = std::move(hf);
  });
  return out;
}

namespace {

// max over scales of |F(i+s) - F(i)| / (s step)^alpha at s = 1 and 10 nodes
template <class Diff>
double two_scale_quotient(std::size_t n, double step, double alpha, Diff diff) {
  double q = 0.0;
  for (std::size_t s : {std::size_t{1}, std::size_t{10}}) {
    if (s >= n) continue;
    double scale = std::pow(static_cast<double>(s) * step, alpha);
    for (std::size_t i = 0; i + s < n; ++i) q = std::max(q, diff(i, i + s) / scale);
  }
  return q;
}

void fill_exponential(NormReport& rep, const SymRadialTensor& h, const NormConfig& cfg) {
  const auto& grid = h.grid;
  const auto& win = cfg.window;
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double v = h.norm_at(i) / win.weight(grid.r(i), cfg.lambda);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  rep.exp_c0 = best;
  bool deep_end = win.kind == SmallPartWindow::Kind::cusp && arg + 1 == grid.n;
  rep.exp_c0_unbounded = deep_end && best > 0.0;

  if (win.kind == SmallPartWindow::Kind::none) {
    rep.u = {};
    rep.c_r = 0.0;
  } else {
    rep.c_r = win.projection_radius(grid.r_min, grid.r_max());
    rep.u = canonical_variation(h, rep.c_r);
  }
  Mat3 um = rep.u.frame();
  double rem = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double r = grid.r(i);
    double rho = win.cutoff(r);
    rem = std::max(rem, (h.at(i) - rho * um).norm() / win.weight(r, cfg.lambda));
  }
  rep.decomposition_remainder = rem;
  rep.decomposition = rem + rep.u.norm();
}

}  // namespace

double decomposition_value(const SymRadialTensor& h, const TrivialEinsteinVariation& u, const NormConfig& cfg) {
  Mat3 um = u.frame();
  double rem = 0.0;
  for (std::size_t i = 0; i < h.grid.n; ++i) {
    double r = h.grid.r(i);
    rem = std::max(rem, (h.at(i) - cfg.window.cutoff(r) * um).norm() / cfg.window.weight(r, cfg.lambda));
  }
  return rem + u.norm();
}

NormReport decomposition_norm(const SymRadialTensor& h, const WarpedMetric& metric, const NormConfig& cfg) {
  cfg.validate();
  if (!h.grid.same_as(metric.grid)) throw GridMismatch("decomposition_norm: grids differ");
  NormReport rep;
  rep.sup_c0 = h.sup_norm();
  fill_exponential(rep, h, cfg);
  return rep;
}

NormReport hybrid_norms(const SymRadialTensor& h, const WarpedMetric& metric, const NormConfig& cfg) {
  cfg.validate();
  if (!h.grid.same_as(metric.grid)) throw GridMismatch("hybrid_norms: grids differ");
  const auto& grid = metric.grid;
  const std::size_t n = grid.n;
  const double step = grid.step;
  PointwiseNorms pw = pointwise_norms(h, metric);

  NormReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    rep.sup_c0 = std::max(rep.sup_c0, pw.h[i]);
    rep.sup_c1 = std::max(rep.sup_c1, pw.h[i] + pw.grad[i]);
    rep.sup_c2 = std::max(rep.sup_c2, pw.h[i] + pw.grad[i] + pw.hess[i]);
  }
  rep.holder_c0 =
      two_scale_quotient(n, step, cfg.alpha, [&](std::size_t i, std::size_t j) { return (h.at(j) - h.at(i)).norm(); });
  rep.holder_c2 = two_scale_quotient(n, step, cfg.alpha, [&](std::size_t i, std::size_t j) {
    return (pw.hess_frame[j] - pw.hess_frame[i]).norm();
  });

  std::vector<double> vol(n), g0(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    vol[i] = metric.a[i] * metric.b[i] * cfg.section_area;
    g0[i] = pw.h[i] * pw.h[i];
    g2[i] = g0[i] + pw.grad[i] * pw.grad[i] + pw.lap[i] * pw.lap[i];
  }
  const double w = cfg.weight_exponent();
  const std::size_t stride = cfg.basepoint_stride;
  const std::size_t m = (n + stride - 1) / stride;
  const auto r0_nodes = static_cast<std::size_t>(std::llround(cfg.r0 / step));
  rep.weighted.resize(m);
  parallel_for(m, [&](std::size_t s) {
    const std::size_t j = s * stride;
    const double rx = grid.r(j);
    std::vector<double> fw(n), f0(n), f2(n);
    for (std::size_t i = 0; i < n; ++i) {
      fw[i] = std::exp(-w * std::abs(grid.r(i) - rx)) * vol[i];
      f0[i] = fw[i] * g0[i];
      f2[i] = fw[i] * g2[i];
    }
    WeightedSample ws;
    ws.r = rx;
    // split at the basepoint, where the weight has a kink
    ws.l2_c0 = simpson(f0, 0, j, step) + simpson(f0, j, n - 1, step);
    ws.l2_c2 = simpson(f2, 0, j, step) + simpson(f2, j, n - 1, step);
    double ann = 0.0;
    if (j >= r0_nodes) {
      std::size_t hi = j - r0_nodes;
      std::size_t lo = j >= 2 * r0_nodes ? j - 2 * r0_nodes : 0;
      ann += simpson(fw, lo, hi, step);
    }
    if (j + r0_nodes < n) {
      std::size_t lo = j + r0_nodes;
      std::size_t hi = std::min(n - 1, j + 2 * r0_nodes);
      ann += simpson(fw, lo, hi, step);
    }
    ws.annulus = ann;
    ws.in_E = ann <= cfg.eps_bar;
    rep.weighted[s] = ws;
  });
  for (const auto& ws : rep.weighted) {
    if (ws.in_E) continue;
    rep.weighted_c0 = std::max(rep.weighted_c0, std::sqrt(ws.l2_c0));
    rep.weighted_c2 = std::max(rep.weighted_c2, std::sqrt(ws.l2_c2));
  }
  rep.hybrid_0 = std::max(rep.sup_c0 + rep.holder_c0, rep.weighted_c0);
  rep.hybrid_2 = std::max(rep.sup_c2 + rep.holder_c2, rep.weighted_c2);
  fill_exponential(rep, h, cfg);
  return rep;
}

}  // namespace pinchlab
