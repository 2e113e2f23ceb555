#include "pinchlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pinchlab/errors.hpp"
#include "pinchlab/geometry.hpp"
#include "pinchlab/grid.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/pointwise.hpp"

namespace pinchlab {

std::string to_string(BoundaryPolicy p) {
  return p == BoundaryPolicy::decay_both_ends ? "decay-both-ends" : "match-hyperbolic-ends";
}

std::pair<Mat3, Mat3> hyperbolic_end_data(const WarpedMetric& metric) {
  struct Model {
    double (*a)(double);
    double (*b)(double);
  };
  static const Model models[] = {
      {[](double r) { return std::sinh(r); }, [](double r) { return std::cosh(r); }},
      {[](double r) { return 0.5 * std::exp(r); }, [](double r) { return 0.5 * std::exp(r); }},
      {[](double r) { return std::exp(-r); }, [](double r) { return std::exp(-r); }},
  };
  auto data = [&](std::size_t i) {
    double r = metric.grid.r(i), a = metric.a[i], b = metric.b[i];
    double best = std::numeric_limits<double>::infinity();
    Mat3 out = Mat3::Zero();
    for (const auto& m : models) {
      double ah = m.a(r), bh = m.b(r);
      double miss = std::abs(ah / a - 1.0) + std::abs(bh / b - 1.0);
      if (miss < best) {
        best = miss;
        out = Mat3::Zero();
        out(0, 0) = ah * ah / (a * a) - 1.0;
        out(1, 1) = bh * bh / (b * b) - 1.0;
      }
    }
    return out;
  };
  return {data(0), data(metric.grid.n - 1)};
}

namespace {

using Block = Eigen::Matrix<double, 6, 6>;

// L at node i as A0 H + A1 H' + A2 H'' on frame components.
std::array<Block, 3> local_blocks(const WarpedMetric& m, std::size_t i) {
  PointGeometry p = point_geometry(m.jet(i));
  const std::array<double, 3> w{m.a[i], m.b[i], 1.0}, dw{m.da[i], m.db[i], 0.0}, ddw{m.dda[i], m.ddb[i], 0.0};
  std::array<Block, 3> A;
  for (int k = 0; k < 6; ++k) {
    int pi = kCompIndex[k][0], qi = kCompIndex[k][1];
    double W = w[pi] * w[qi];
    double W1 = dw[pi] * w[qi] + w[pi] * dw[qi];
    double W2 = ddw[pi] * w[qi] + 2.0 * dw[pi] * dw[qi] + w[pi] * ddw[qi];
    const double coef[3][3] = {{W, W1, W2}, {0.0, W, 2.0 * W1}, {0.0, 0.0, W}};
    for (int order = 0; order < 3; ++order) {
      Mat3 v = Mat3::Zero(), v1 = Mat3::Zero(), v2 = Mat3::Zero();
      v(pi, qi) = v(qi, pi) = coef[order][0];
      v1(pi, qi) = v1(qi, pi) = coef[order][1];
      v2(pi, qi) = v2(qi, pi) = coef[order][2];
      Mat3 out = linearized_einstein_coord(p, TensorJet::radial(v, v1, v2));
      for (int o = 0; o < 6; ++o) {
        int a = kCompIndex[o][0], b = kCompIndex[o][1];
        A[order](o, k) = out(a, b) / (w[a] * w[b]);
      }
    }
  }
  return A;
}

// Rows of the discrete L at node i, mirroring the stencil application of d1/d2.
void add_rows(std::vector<Eigen::Triplet<double>>& trip, const std::array<Block, 3>& A, std::size_t i, std::size_t n,
              double step) {
  const Stencil s1 = d1_stencil(i, n, step), s2 = d2_stencil(i, n, step);
  auto put = [&](std::size_t node, const Block& B, double c) {
    if (c == 0.0) return;
    for (int o = 0; o < 6; ++o)
      for (int k = 0; k < 6; ++k)
        if (B(o, k) != 0.0)
          trip.emplace_back(static_cast<int>(6 * i + o), static_cast<int>(6 * node + k), c * B(o, k));
  };
  put(i, A[0], 1.0);
  double sum1 = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < s1.count; ++k) {
    put(s1.first + k, A[1], s1.w[k]);
    sum1 += s1.w[k];
  }
  for (std::size_t k = 0; k < s2.count; ++k) {
    put(s2.first + k, A[2], s2.w[k]);
    sum2 += s2.w[k];
  }
  put(i, A[1], -sum1);
  put(i, A[2], -sum2);
}

Eigen::SparseMatrix<double> assemble(const WarpedMetric& metric, bool dirichlet) {
  metric.validate();
  const std::size_t n = metric.grid.n;
  std::vector<std::array<Block, 3>> blocks(n);
  parallel_for(n, [&](std::size_t i) { blocks[i] = local_blocks(metric, i); });
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * 6 * 6 * 6);
  for (std::size_t i = 0; i < n; ++i) {
    if (dirichlet && (i == 0 || i + 1 == n)) {
      for (int o = 0; o < 6; ++o) trip.emplace_back(static_cast<int>(6 * i + o), static_cast<int>(6 * i + o), 1.0);
      continue;
    }
    add_rows(trip, blocks[i], i, n, metric.grid.step);
  }
  const int N = static_cast<int>(6 * n);
  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

double interior_sup(const SymRadialTensor& t) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < t.grid.n; ++i) s = std::max(s, t.norm_at(i));
  return s;
}

}  // namespace

Eigen::SparseMatrix<double> linearized_matrix(const WarpedMetric& metric) { return assemble(metric, false); }

LinearizedInverse::LinearizedInverse(const WarpedMetric& metric)
    : metric_(metric), lu_(std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>()) {
  Eigen::SparseMatrix<double> M = assemble(metric, true);
  lu_->analyzePattern(M);
  lu_->factorize(M);
  if (lu_->info() != Eigen::Success) throw DomainError("invert_linearized: the discrete operator is singular");
}

SymRadialTensor LinearizedInverse::solve(const SymRadialTensor& f, const Mat3& left, const Mat3& right) const {
  if (!f.grid.same_as(metric_.grid)) throw GridMismatch("invert_linearized: forcing and metric grids differ");
  const std::size_t n = f.grid.n;
  Eigen::VectorXd rhs(6 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 6; ++k) rhs(6 * i + k) = f.c[k][i];
  for (int k = 0; k < 6; ++k) {
    rhs(k) = left(kCompIndex[k][0], kCompIndex[k][1]);
    rhs(6 * (n - 1) + k) = right(kCompIndex[k][0], kCompIndex[k][1]);
  }
  Eigen::VectorXd x = lu_->solve(rhs);
  SymRadialTensor h = SymRadialTensor::zeros(f.grid);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 6; ++k) h.c[k][i] = x(6 * i + k);
  return h;
}

Inversion invert_linearized(const SymRadialTensor& f, const WarpedMetric& metric, BoundaryPolicy policy) {
  LinearizedInverse inv(metric);
  Mat3 left = Mat3::Zero(), right = Mat3::Zero();
  if (policy == BoundaryPolicy::match_hyperbolic_ends) std::tie(left, right) = hyperbolic_end_data(metric);
  Inversion out;
  out.h = inv.solve(f, left, right);
  out.residual = interior_sup(linearized_einstein(out.h, metric) - f);
  double mid = 0.5 * (metric.grid.r_min + metric.grid.r_max());
  out.trivial = canonical_variation(out.h, mid);
  double sup = out.h.sup_norm();
  out.resonant = sup > 0.0 && out.trivial.norm() > 0.5 * sup;
  return out;
}

double calibrated_inverse_constant() { return 10.0; }

BanachResult banach_iterate(const WarpedMetric& gbar, const BanachConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw DomainError("banach_iterate: need tol > 0 and max_iter >= 1");
  const std::size_t n = gbar.grid.n;
  LinearizedInverse inv(gbar);
  BanachResult res;
  res.h = SymRadialTensor::zeros(gbar.grid);
  if (cfg.policy == BoundaryPolicy::match_hyperbolic_ends) {
    auto [left, right] = hyperbolic_end_data(gbar);
    res.h.set(0, left);
    res.h.set(n - 1, right);
  }
  res.initial_sec_deviation = curvature_of_jets(gbar.grid, perturbed_jets(gbar, SymRadialTensor::zeros(gbar.grid)))
                                  .sup_over(2, n - 3);
  SymRadialTensor phi = einstein_operator_perturbed(gbar, res.h);
  double residual = interior_sup(phi);
  res.initial_residual = residual;
  res.phi_warning = residual > cfg.phi_warning;
  double prev_update = 0.0;
  int above = 0;
  for (int k = 1; k <= cfg.max_iter && residual > cfg.tol; ++k) {
    SymRadialTensor dh = inv.solve(phi, Mat3::Zero(), Mat3::Zero());
    res.h -= dh;
    BanachStep st;
    st.k = k;
    st.update = dh.sup_norm();
    st.ratio = k > 1 && prev_update > 0.0 ? st.update / prev_update : 0.0;
    phi = einstein_operator_perturbed(gbar, res.h);
    residual = interior_sup(phi);
    st.residual = residual;
    res.trace.push_back(st);
    if (k > 1) res.max_ratio = std::max(res.max_ratio, st.ratio);
    // updates at rounding level carry no contraction information
    bool noise = st.update <= 1e-14 * std::max(1.0, res.h.sup_norm());
    above = (!noise && st.ratio > cfg.divergence) ? above + 1 : 0;
    if (above >= 2) {
      std::ostringstream msg;
      msg << "banach_iterate: contraction ratio above " << cfg.divergence << " twice in a row; trace:";
      for (const auto& t : res.trace) msg << " [k=" << t.k << " update=" << t.update << " ratio=" << t.ratio << "]";
      throw DivergenceError(msg.str());
    }
    if (noise) break;
    prev_update = st.update;
  }
  res.final_residual = residual;
  res.converged = residual <= cfg.tol;
  res.contraction_certified = res.max_ratio <= cfg.contraction;
  auto jets = perturbed_jets(gbar, res.h);
  res.g0.grid = gbar.grid;
  res.g0.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.g0.g[i] = jets[i].g;
  res.sup_sec_deviation = curvature_of_jets(gbar.grid, jets).sup_over(2, n - 3);
  PointwiseNorms pw = pointwise_norms(res.h, gbar);
  for (std::size_t i = 0; i < n; ++i) res.c2_distance = std::max(res.c2_distance, pw.h[i] + pw.grad[i] + pw.hess[i]);
  return res;
}

double poincare_constant() { return deviation_constant_3d() * (1.0 + std::sqrt(3.0)); }

IntegralReport integral_inequality_checks(const SymRadialTensor& h, const WarpedMetric& metric, double section_area) {
  if (!h.grid.same_as(metric.grid)) throw GridMismatch("integral_inequality_checks: grids differ");
  const std::size_t n = metric.grid.n;
  for (std::size_t i = 0; i < n; ++i) {
    if ((i < 3 || i + 3 >= n) && h.norm_at(i) != 0.0)
      throw DomainError("integral_inequality_checks: support touches the window boundary");
  }
  PointwiseNorms pw = pointwise_norms(h, metric);
  std::vector<double> f0(n), f1(n), fr(n);
  double trace = 0.0, sup = h.sup_norm();
  for (std::size_t i = 0; i < n; ++i) {
    double vol = metric.a[i] * metric.b[i] * section_area;
    Vec3 w = metric.frame_weights(i);
    Mat3 H = h.at(i);
    Mat3 hc = w.asDiagonal() * H * w.asDiagonal();
    Mat3 ric = weitzenboeck_coord(point_geometry(metric.jet(i)), hc);
    Mat3 ricf = w.cwiseInverse().asDiagonal() * ric * w.cwiseInverse().asDiagonal();
    f0[i] = vol * pw.h[i] * pw.h[i];
    f1[i] = vol * pw.grad[i] * pw.grad[i];
    fr[i] = vol * (ricf.array() * H.array()).sum();
    trace = std::max(trace, std::abs(H.trace()));
  }
  IntegralReport rep;
  rep.h_sq = simpson(f0, metric.grid.step);
  rep.grad_sq = simpson(f1, metric.grid.step);
  rep.ric_pair = simpson(fr, metric.grid.step);
  rep.first_margin = rep.grad_sq + 0.5 * rep.ric_pair;
  rep.rayleigh = rep.h_sq > 0.0 ? rep.grad_sq / rep.h_sq : 0.0;
  rep.traceless = trace <= 1e-12 * std::max(sup, 1e-300);
  rep.eps = curvature_of_warped(metric).sup_sec_deviation(-1.0);
  rep.poincare_bound = 3.0 - poincare_constant() * rep.eps;
  if (rep.traceless && rep.h_sq > 0.0) rep.poincare_holds = rep.rayleigh >= rep.poincare_bound;
  return rep;
}

}  // namespace pinchlab
