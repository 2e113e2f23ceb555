#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pinchlab/cusp_ode.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/solver.hpp"
#include "pinchlab/tensor_core.hpp"

using namespace pinchlab;

namespace {

SymRadialTensor decaying(const RadialGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  double co[6][3];
  for (auto& row : co)
    for (double& x : row) x = N(rng);
  return SymRadialTensor::from_function(grid, [&](double r) {
    Mat3 m;
    for (int k = 0; k < 6; ++k) {
      auto [p, q] = kCompIndex[k];
      m(p, q) = m(q, p) = co[k][0] * std::exp(-r) * std::sin(co[k][1] * r) + co[k][2] * std::exp(-1.3 * r);
    }
    return m;
  });
}

SymRadialTensor single(const RadialGrid& grid, int comp, const std::function<double(double)>& f) {
  auto [p, q] = kCompIndex[comp];
  return SymRadialTensor::from_function(grid, [&](double r) {
    Mat3 m = Mat3::Zero();
    m(p, q) = m(q, p) = f(r);
    return m;
  });
}

double interior_max(const SymRadialTensor& t) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < t.grid.n; ++i) s = std::max(s, t.norm_at(i));
  return s;
}

NormConfig cusp_config(double boundary) {
  NormConfig c;
  c.window.kind = SmallPartWindow::Kind::cusp;
  c.window.boundary_r = boundary;
  return c;
}

}  // namespace

TEST(NormConfig, ValidatesRanges) {
  NormConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.weight_exponent(), 2.0 - c.delta);
  auto bad = [](auto mutate) {
    NormConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), DomainError);
  };
  bad([](NormConfig& c) { c.n = 2; });
  bad([](NormConfig& c) { c.delta = 2.0; });
  bad([](NormConfig& c) { c.r0 = 0.5; });
  bad([](NormConfig& c) { c.eps_bar = 0.0; });
  bad([](NormConfig& c) { c.lambda = 1.0; });
  bad([](NormConfig& c) { c.b = 1.0; });
  bad([](NormConfig& c) { c.eta = 2.4; });
  bad([](NormConfig& c) { c.section_area = -1.0; });
  bad([](NormConfig& c) { c.basepoint_stride = 0; });
}

TEST(HybridNorms, ZeroTensorHasZeroNorms) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormReport r = hybrid_norms(SymRadialTensor::zeros(cusp.grid), cusp, NormConfig{});
  EXPECT_EQ(r.sup_c0, 0.0);
  EXPECT_EQ(r.sup_c2, 0.0);
  EXPECT_EQ(r.holder_c2, 0.0);
  EXPECT_EQ(r.hybrid_0, 0.0);
  EXPECT_EQ(r.hybrid_2, 0.0);
  EXPECT_EQ(r.decomposition, 0.0);
}

TEST(HybridNorms, WeightedIntegralMatchesClosedForm) {
  // h = e^{-r} e3 (x) e3 on the cusp: |h|^2 vol = e^{-4r}
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormConfig cfg;
  const double w = cfg.weight_exponent(), L = cusp.grid.r_max();
  NormReport r = hybrid_norms(single(cusp.grid, k33, [](double r) { return std::exp(-r); }), cusp, cfg);
  ASSERT_EQ(r.weighted.size(), cusp.grid.n);
  for (std::size_t j = 0; j < cusp.grid.n; j += 37) {
    double x = cusp.grid.r(j);
    double left = std::exp(-w * x) * std::expm1((w - 4.0) * x) / (w - 4.0);
    double right = std::exp(w * x) * (std::exp(-(w + 4.0) * x) - std::exp(-(w + 4.0) * L)) / (w + 4.0);
    EXPECT_NEAR(r.weighted[j].l2_c0, left + right, 1e-6 * (left + right)) << "x = " << x;
  }
}

TEST(HybridNorms, HybridIsMaxOfConstituents) {
  std::mt19937_64 rng(3);
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormReport r = hybrid_norms(decaying(cusp.grid, rng), cusp, NormConfig{});
  EXPECT_DOUBLE_EQ(r.hybrid_0, std::max(r.sup_c0 + r.holder_c0, r.weighted_c0));
  EXPECT_DOUBLE_EQ(r.hybrid_2, std::max(r.sup_c2 + r.holder_c2, r.weighted_c2));
  EXPECT_GE(r.sup_c2, r.sup_c1);
  EXPECT_GE(r.sup_c1, r.sup_c0);
}

TEST(HybridNorms, AreNormsOnSampledSpace) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  auto cusp = hyperbolic_cusp(0.0, 5.0, 1e-2);
  NormConfig cfg;
  for (int k = 0; k < 5; ++k) {
    auto x = decaying(cusp.grid, rng), y = decaying(cusp.grid, rng);
    double s = U(rng);
    NormReport nx = hybrid_norms(x, cusp, cfg), ny = hybrid_norms(y, cusp, cfg);
    NormReport ns = hybrid_norms(s * x, cusp, cfg), nxy = hybrid_norms(x + y, cusp, cfg);
    EXPECT_NEAR(ns.hybrid_0, std::abs(s) * nx.hybrid_0, 1e-10 * nx.hybrid_0 * std::abs(s));
    EXPECT_NEAR(ns.hybrid_2, std::abs(s) * nx.hybrid_2, 1e-10 * nx.hybrid_2 * std::abs(s));
    EXPECT_LE(nxy.hybrid_0, (nx.hybrid_0 + ny.hybrid_0) * (1.0 + 1e-10));
    EXPECT_LE(nxy.hybrid_2, (nx.hybrid_2 + ny.hybrid_2) * (1.0 + 1e-10));
  }
}

TEST(HybridNorms, SetEDependsOnlyOnMetric) {
  std::mt19937_64 rng(4);
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormConfig cfg;
  cfg.eps_bar = 2e-3;
  NormReport a = hybrid_norms(decaying(cusp.grid, rng), cusp, cfg);
  NormReport b = hybrid_norms(decaying(cusp.grid, rng), cusp, cfg);
  bool some_in = false, some_out = false;
  for (std::size_t j = 0; j < a.weighted.size(); ++j) {
    EXPECT_EQ(a.weighted[j].in_E, b.weighted[j].in_E);
    EXPECT_EQ(a.weighted[j].in_E, a.weighted[j].annulus <= cfg.eps_bar);
    (a.weighted[j].in_E ? some_in : some_out) = true;
  }
  // the cusp volume decays, so deep basepoints fall in E
  EXPECT_TRUE(some_in);
  EXPECT_TRUE(some_out);
  EXPECT_TRUE(a.weighted.back().in_E);
}

TEST(HybridNorms, GridMismatchThrows) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  auto other = RadialGrid::over(0.0, 5.0, 1e-2);
  EXPECT_THROW(hybrid_norms(SymRadialTensor::zeros(other), cusp, NormConfig{}), GridMismatch);
  EXPECT_THROW(decomposition_norm(SymRadialTensor::zeros(other), cusp, NormConfig{}), GridMismatch);
}

TEST(DecompositionNorm, TrivialVariationIsUnboundedExponentiallyButFiniteDecomposed) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  TrivialEinsteinVariation u{0.3, -0.2, -0.3};
  // window boundary two units before the grid: the cutoff is 1 on the whole grid
  NormConfig cfg = cusp_config(-2.0);
  NormReport r = hybrid_norms(u.on(cusp.grid), cusp, cfg);
  for (std::size_t i = 0; i < cusp.grid.n; ++i) EXPECT_NEAR(u.on(cusp.grid).norm_at(i), u.norm(), 1e-15);
  EXPECT_TRUE(r.exp_c0_unbounded);
  EXPECT_NEAR(r.exp_c0, u.norm() * std::exp(cfg.lambda * 8.0), 1e-12);
  EXPECT_EQ(r.decomposition_remainder, 0.0);
  EXPECT_NEAR(r.decomposition, u.norm(), 1e-15);
  EXPECT_NEAR(r.u.u11, u.u11, 1e-15);
  EXPECT_NEAR(r.u.u12, u.u12, 1e-15);
}

TEST(DecompositionNorm, DecayingNonTrivialPartHasNoVariation) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormConfig cfg = cusp_config(0.0);
  auto h = single(cusp.grid, k33, [&](double r) { return std::exp(-cfg.lambda * r); });
  NormReport r = decomposition_norm(h, cusp, cfg);
  EXPECT_EQ(r.u.norm(), 0.0);
  EXPECT_FALSE(r.exp_c0_unbounded);
  EXPECT_NEAR(r.decomposition, r.exp_c0, 1e-15);
  EXPECT_NEAR(r.exp_c0, 1.0, 1e-12);
}

TEST(DecompositionNorm, CanonicalChoiceBeatsExplicitDecompositionsOfVariation) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  NormConfig cfg = cusp_config(-2.0);
  TrivialEinsteinVariation u{0.4, 0.1, -0.4};
  auto h = u.on(cusp.grid);
  double value = decomposition_norm(h, cusp, cfg).decomposition;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N;
  for (int k = 0; k < 200; ++k) {
    double a = 0.4 + 0.1 * N(rng);
    TrivialEinsteinVariation v{a, 0.1 + 0.1 * N(rng), -a};
    EXPECT_LE(value, decomposition_value(h, v, cfg) + 1e-15);
  }
}

TEST(DecompositionNorm, DominatesHalfTheSupNorm) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N;
  auto cusp = hyperbolic_cusp(0.0, 6.0, 2e-2);
  for (int k = 0; k < 1000; ++k) {
    NormConfig cfg;
    cfg.lambda = 0.05 + 0.9 * U(rng);
    cfg.eta = 2.0 + cfg.lambda;
    cfg.window.kind = k % 2 ? SmallPartWindow::Kind::cusp : SmallPartWindow::Kind::tube;
    cfg.window.boundary_r = k % 2 ? -1.0 + 3.0 * U(rng) : 3.0 + 4.0 * U(rng);
    double a = N(rng);
    TrivialEinsteinVariation u{a, N(rng), -a};
    auto h = decaying(cusp.grid, rng) + u.on(cusp.grid);
    NormReport r = decomposition_norm(h, cusp, cfg);
    ASSERT_LE(r.sup_c0, 2.0 * r.decomposition * (1.0 + 1e-12));
  }
}

TEST(SmallPartWindow, WeightsAndCutoffs) {
  SmallPartWindow cusp{SmallPartWindow::Kind::cusp, 1.0};
  EXPECT_DOUBLE_EQ(cusp.weight(0.5, 0.3), 1.0);
  EXPECT_NEAR(cusp.weight(3.0, 0.3), std::exp(-0.6), 1e-15);
  EXPECT_EQ(cusp.cutoff(0.5), 0.0);
  EXPECT_EQ(cusp.cutoff(2.5), 1.0);
  EXPECT_EQ(cusp.projection_radius(0.0, 7.0), 7.0);
  SmallPartWindow tube{SmallPartWindow::Kind::tube, 6.0};
  EXPECT_NEAR(tube.weight(2.0, 0.5), std::exp(-2.0) + std::exp(-1.0), 1e-15);
  EXPECT_EQ(tube.cutoff(0.5), 0.0);
  EXPECT_EQ(tube.cutoff(3.0), 1.0);
  EXPECT_EQ(tube.cutoff(5.5), 1.0);
  EXPECT_EQ(tube.cutoff(6.5), 0.0);
  EXPECT_EQ(tube.projection_radius(0.0, 10.0), 3.0);
  SmallPartWindow none;
  EXPECT_EQ(none.weight(2.0, 0.5), 1.0);
  EXPECT_EQ(none.cutoff(2.0), 0.0);
}

TEST(InvertLinearized, ZeroForcingGivesZero) {
  auto cusp = hyperbolic_cusp(0.0, 8.0, 1e-2);
  Inversion inv = invert_linearized(SymRadialTensor::zeros(cusp.grid), cusp, BoundaryPolicy::decay_both_ends);
  EXPECT_EQ(inv.h.sup_norm(), 0.0);
  EXPECT_EQ(inv.residual, 0.0);
  EXPECT_FALSE(inv.resonant);
}

TEST(InvertLinearized, PureTraceForcingGivesTwiceTrace) {
  // tr L(e^{-r} I/3) = e^{-r}/2, so f = e^{-r} I/3 has tr h = 2 e^{-r}
  auto cusp = hyperbolic_cusp(0.0, 8.0, 1e-3);
  auto f = SymRadialTensor::from_function(cusp.grid, [](double r) { return Mat3(std::exp(-r) / 3.0 * Mat3::Identity()); });
  LinearizedInverse inv(cusp);
  const double L = cusp.grid.r_max();
  Mat3 left = 2.0 / 3.0 * Mat3::Identity(), right = 2.0 / 3.0 * std::exp(-L) * Mat3::Identity();
  SymRadialTensor h = inv.solve(f, left, right);
  for (std::size_t i = 0; i < cusp.grid.n; i += 50) {
    double r = cusp.grid.r(i);
    EXPECT_NEAR(h.trace_at(i) / (2.0 * std::exp(-r)), 1.0, 1e-6) << "r = " << r;
  }
}

TEST(InvertLinearized, RoundTripsBothWays) {
  std::mt19937_64 rng(17);
  auto cusp = hyperbolic_cusp(0.0, 10.0, 1e-2);
  LinearizedInverse inv(cusp);
  const std::size_t n = cusp.grid.n;
  for (int k = 0; k < 10; ++k) {
    auto f = decaying(cusp.grid, rng);
    SymRadialTensor h = inv.solve(f, Mat3::Zero(), Mat3::Zero());
    EXPECT_LE(interior_max(linearized_einstein(h, cusp) - f), 1e-6 * f.sup_norm());
    auto g = decaying(cusp.grid, rng);
    SymRadialTensor back = inv.solve(linearized_einstein(g, cusp), g.at(0), g.at(n - 1));
    EXPECT_LE((back - g).sup_norm(), 1e-6 * g.sup_norm());
  }
}

TEST(InvertLinearized, AprioriRatioBelowCalibratedConstant) {
  std::mt19937_64 rng(29);
  auto cusp = hyperbolic_cusp(0.0, 10.0, 1e-2);
  LinearizedInverse inv(cusp);
  NormConfig cfg;
  for (int k = 0; k < 20; ++k) {
    auto f = decaying(cusp.grid, rng);
    Inversion out = invert_linearized(f, cusp, BoundaryPolicy::decay_both_ends);
    EXPECT_LE(out.residual, 1e-8 * std::max(1.0, f.sup_norm()));
    double ratio = hybrid_norms(out.h, cusp, cfg).hybrid_2 / hybrid_norms(f, cusp, cfg).hybrid_0;
    EXPECT_LE(ratio, calibrated_inverse_constant());
  }
}

TEST(InvertLinearized, MatrixAgreesWithOperator) {
  std::mt19937_64 rng(2);
  auto m = drilling_interpolation(5.0, CutoffProfile(), 1.5, 8.0, 1e-2);
  auto h = decaying(m.grid, rng);
  auto M = linearized_matrix(m);
  const std::size_t n = m.grid.n;
  Eigen::VectorXd x(6 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 6; ++k) x(6 * i + k) = h.c[k][i];
  Eigen::VectorXd y = M * x;
  auto Lh = linearized_einstein(h, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(y(6 * i + k) - Lh.c[k][i]));
  EXPECT_LE(worst, 1e-10 * std::max(1.0, Lh.sup_norm()));
}

TEST(InvertLinearized, HyperbolicEndDataPicksClosestModel) {
  auto m = drilling_interpolation(5.0, CutoffProfile(), 1.5, 8.0, 1e-2);
  auto [left, right] = hyperbolic_end_data(m);
  // the drilling metric is exactly hyperbolic at both ends of this window
  EXPECT_LE(left.norm(), 1e-12);
  EXPECT_LE(right.norm(), 1e-12);
  EXPECT_EQ(to_string(BoundaryPolicy::decay_both_ends), "decay-both-ends");
  EXPECT_EQ(to_string(BoundaryPolicy::match_hyperbolic_ends), "match-hyperbolic-ends");
}

TEST(Banach, HyperbolicMetricConvergesAtStepZero) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  BanachResult r = banach_iterate(cusp);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.h.sup_norm(), 0.0);
  EXPECT_LE(r.sup_sec_deviation, 1e-8);
}

TEST(Banach, DrillingInterpolationContractsAndConverges) {
  const double R = 5.0;
  auto g = drilling_interpolation(R, CutoffProfile(), R - 3.5, R + 3.0, 2e-3);
  BanachResult r = banach_iterate(g);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.contraction_certified);
  EXPECT_LE(r.max_ratio, 0.5);
  EXPECT_LE(r.final_residual, 1e-9);
  EXPECT_LT(r.sup_sec_deviation, 1e-3 * r.initial_sec_deviation);
  EXPECT_FALSE(r.phi_warning);
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LT(r.trace[k].update, r.trace[k - 1].update);
}

TEST(Banach, ConfigValidation) {
  auto cusp = hyperbolic_cusp(0.0, 6.0, 1e-2);
  BanachConfig c;
  c.tol = 0.0;
  EXPECT_THROW(banach_iterate(cusp, c), DomainError);
  c.tol = 1e-9;
  c.max_iter = 0;
  EXPECT_THROW(banach_iterate(cusp, c), DomainError);
}

TEST(IntegralInequalities, ZeroTensorGivesZeros) {
  auto cusp = hyperbolic_cusp(0.0, 8.0, 1e-2);
  IntegralReport r = integral_inequality_checks(SymRadialTensor::zeros(cusp.grid), cusp);
  EXPECT_EQ(r.h_sq, 0.0);
  EXPECT_EQ(r.grad_sq, 0.0);
  EXPECT_EQ(r.ric_pair, 0.0);
  EXPECT_EQ(r.first_margin, 0.0);
}

namespace {

SymRadialTensor bump(const RadialGrid& grid, double c, double w, const Mat3& A) {
  return SymRadialTensor::from_function(grid, [&](double r) {
    double u = (r - c) / w;
    double v = std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    return Mat3(v * A);
  });
}

}  // namespace

TEST(IntegralInequalities, TracelessBumpsHaveSpectralGap) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N;
  auto cusp = hyperbolic_cusp(0.0, 12.0, 1e-2);
  for (int k = 0; k < 50; ++k) {
    double c = 2.0 + 8.0 * U(rng), w = std::min({0.3 + 3.0 * U(rng), c - 0.1, 11.9 - c});
    Mat3 A;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) A(i, j) = A(j, i) = N(rng);
    A -= A.trace() / 3.0 * Mat3::Identity();
    IntegralReport r = integral_inequality_checks(bump(cusp.grid, c, w, A), cusp);
    EXPECT_TRUE(r.traceless);
    EXPECT_GE(r.rayleigh, 3.0 - 1e-3);
    EXPECT_TRUE(r.poincare_holds);
    EXPECT_GE(r.first_margin / r.h_sq, -1e-8);
    EXPECT_LE(r.eps, 1e-8);
  }
}

TEST(IntegralInequalities, PureTraceBumpSatisfiesFirstInequality) {
  auto cusp = hyperbolic_cusp(0.0, 12.0, 1e-2);
  IntegralReport r = integral_inequality_checks(bump(cusp.grid, 6.0, 2.0, Mat3::Identity()), cusp);
  EXPECT_FALSE(r.traceless);
  EXPECT_TRUE(r.poincare_holds);
  EXPECT_GE(r.first_margin / r.h_sq, -1e-8);
}

TEST(IntegralInequalities, SupportTouchingBoundaryThrows) {
  auto cusp = hyperbolic_cusp(0.0, 12.0, 1e-2);
  EXPECT_THROW(integral_inequality_checks(bump(cusp.grid, 0.5, 2.0, Mat3::Identity()), cusp), DomainError);
}

TEST(IntegralInequalities, PoincareConstantStructure) {
  EXPECT_GT(poincare_constant(), 0.0);
  auto m = drilling_interpolation(4.0, CutoffProfile(), 1.0, 7.0, 1e-2);
  Mat3 A = Mat3::Zero();
  A(0, 1) = A(1, 0) = 1.0;
  IntegralReport r = integral_inequality_checks(bump(m.grid, 4.0, 2.0, A), m);
  EXPECT_GT(r.eps, 0.0);
  EXPECT_DOUBLE_EQ(r.poincare_bound, 3.0 - poincare_constant() * r.eps);
}
