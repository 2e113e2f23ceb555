#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pinchlab/cusp_ode.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/pointwise.hpp"
#include "pinchlab/tensor_core.hpp"

using namespace pinchlab;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) h(i, j) = h(j, i) = N(rng);
  return h;
}

// Definition evaluated by plain index loops.
Eigen::MatrixXd naive_weitzenboeck(const Eigen::MatrixXd& h, const CurvatureTensor& rm) {
  const int n = rm.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i) ric(x, y) += rm(x, i, i, y);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += h(k, y) * ric(k, x) + h(x, k) * ric(k, y);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v -= 2.0 * h(i, j) * rm(i, x, y, j);
      out(x, y) = v;
    }
  return out;
}

double sup_sec_deviation_sampled(const CurvatureTensor& rm, double kappa, std::mt19937_64& rng, int planes) {
  std::normal_distribution<double> N;
  const int n = rm.dim();
  double best = 0.0;
  for (int s = 0; s < planes; ++s) {
    Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(n, [&] { return N(rng); }).normalized();
    Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(n, [&] { return N(rng); });
    y = (y - y.dot(x) * x).normalized();
    double sec = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) sec += rm(i, j, k, l) * x(i) * y(j) * y(k) * x(l);
    best = std::max(best, std::abs(sec - kappa));
  }
  return best;
}

WarpValues analytic(double r) {
  WarpValues w;
  w.a = 1.0 + 0.3 * std::sin(r);
  w.da = 0.3 * std::cos(r);
  w.dda = -0.3 * std::sin(r);
  w.b = std::exp(0.2 * r);
  w.db = 0.2 * w.b;
  w.ddb = 0.04 * w.b;
  return w;
}

}  // namespace

TEST(CurvatureOfWarped, HyperbolicTubeHasCurvatureMinusOne) {
  auto m = hyperbolic_tube(0.05, 3.0).metric;
  EXPECT_LE(curvature_of_warped(m, -1.0).sup_sec_deviation(-1.0), 1e-8);
}

TEST(CurvatureOfWarped, FlatProductIsFlat) {
  auto cd = curvature_of_warped(flat_product(0.0, 5.0), 0.0);
  EXPECT_LE(cd.sup_sec_deviation(0.0), 1e-8);
  EXPECT_LE(curvature_deviation(cd, 0.0), 1e-8);
}

TEST(CurvatureOfWarped, ExpandingAndContractingCuspsAreHyperbolic) {
  EXPECT_LE(curvature_of_warped(expanding_cusp(0.0, 5.0), -1.0).sup_sec_deviation(-1.0), 1e-8);
  EXPECT_LE(curvature_of_warped(hyperbolic_cusp(0.0, 5.0), -1.0).sup_sec_deviation(-1.0), 1e-8);
}

TEST(CurvatureOfWarped, ClosedFormSectionalCurvatures) {
  auto m = WarpedMetric::sample(RadialGrid::over(0.0, 4.0, 1e-3), MetricKind::generic, analytic);
  auto cd = curvature_of_warped(m);
  for (std::size_t i = 0; i < m.grid.n; i += 97) {
    WarpValues w = analytic(m.grid.r(i));
    EXPECT_NEAR(cd.sec_rtheta[i], -w.dda / w.a, 1e-12);
    EXPECT_NEAR(cd.sec_ry[i], -w.ddb / w.b, 1e-12);
    EXPECT_NEAR(cd.sec_thetay[i], -w.da * w.db / (w.a * w.b), 1e-12);
  }
}

TEST(CurvatureOfWarped, AgreesWithChristoffelRouteOnGeneralProfile) {
  auto m = WarpedMetric::sample(RadialGrid::over(0.0, 4.0, 1e-3), MetricKind::generic, analytic);
  auto cd = curvature_of_warped(m, -1.0);
  auto gc = curvature_of_radial(to_radial(m), -1.0);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < m.grid.n; ++i) worst = std::max(worst, std::abs(cd.dev_kappa[i] - gc.dev_kappa[i]));
  EXPECT_LE(worst, 1e-6);
}

TEST(CurvatureOfWarped, RejectsNonPositiveWarpAndShortGrids) {
  auto negative = [](double r) {
    WarpValues w;
    w.a = r - 0.5;
    w.da = 1.0;
    return w;
  };
  EXPECT_THROW(WarpedMetric::sample(RadialGrid::over(0.0, 1.0, 1e-2), MetricKind::generic, negative), DomainError);
  auto m = flat_product(0.0, 1.0, 1e-2);
  m.a[10] = 0.0;
  EXPECT_THROW(curvature_of_warped(m, 0.0), DomainError);
  EXPECT_THROW(flat_product(0.0, 0.003, 1e-3), ResolutionError);
}

TEST(CurvatureDeviation, SandwichHoldsOnTestedMetrics) {
  std::vector<WarpedMetric> metrics{
      drilling_interpolation(4.0, CutoffProfile(), 1.0, 7.0),
      filling_interpolation(5.0, CutoffProfile(CutoffProfile::Shape::smootherstep), 2.0, 8.0),
      WarpedMetric::sample(RadialGrid::over(0.0, 4.0, 1e-3), MetricKind::generic, analytic),
  };
  for (const auto& m : metrics) {
    auto s = curvature_deviation_sandwich(curvature_of_warped(m, -1.0), -1.0);
    EXPECT_TRUE(s.holds()) << s.sup_sec << " " << s.dev << " " << s.c3;
    EXPECT_GT(s.dev, 0.0);
  }
}

TEST(CurvatureDeviation, DrillingInterpolationScalesLikeExpMinusTwoR) {
  // sup|sec + 1| e^{2R} measured 32.504 over R = 4..8 with the default cutoff
  const double a2 = 33.0;
  std::vector<double> scaled;
  for (double R : {4.0, 6.0, 8.0}) {
    auto m = drilling_interpolation(R, CutoffProfile(), R - 3.0, R + 3.0);
    auto cd = curvature_of_warped(m, -1.0);
    EXPECT_LE(cd.sup_sec_deviation(-1.0), a2 * std::exp(-2.0 * R));
    EXPECT_LE(curvature_deviation(cd, -1.0), deviation_constant_3d() * a2 * std::exp(-2.0 * R));
    scaled.push_back(cd.sup_sec_deviation(-1.0) * std::exp(2.0 * R));
  }
  EXPECT_LE(*std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end()), 1.01);
}

TEST(PointwiseCurvature, SupSectionalDeviationDominatesSampledPlanes) {
  std::mt19937_64 rng(11);
  for (int s = 0; s < 50; ++s) {
    CurvatureTensor rm = random_curvature(3, -1.0, 0.3, rng);
    double exact = sup_sectional_deviation(rm, -1.0);
    double sampled = sup_sec_deviation_sampled(rm, -1.0, rng, 4000);
    EXPECT_LE(sampled, exact * (1 + 1e-12));
    EXPECT_GE(sampled, 0.9 * exact);
    double dev = (rm - constant_curvature(3, -1.0)).norm();
    EXPECT_LE(exact, dev * (1 + 1e-12));
    EXPECT_LE(dev, deviation_constant_3d() * exact * (1 + 1e-12));
  }
}

TEST(PointwiseCurvature, ConstantCurvatureHasSectionalKappaAndSymmetries) {
  for (int n = 3; n <= 5; ++n) {
    CurvatureTensor rm = constant_curvature(n, -0.7);
    EXPECT_LE(rm.symmetry_defect(), 1e-15);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) EXPECT_DOUBLE_EQ(rm(i, j, j, i), -0.7);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    EXPECT_LE((kulkarni_nomizu(I, I) * (-0.35) - rm).norm(), 1e-14);
    EXPECT_LE((ricci(rm) - (n - 1) * -0.7 * I).norm(), 1e-14);
  }
}

TEST(Weitzenboeck, MetricIsInKernelExactly) {
  std::mt19937_64 rng(3);
  for (int n = 3; n <= 5; ++n) {
    CurvatureTensor rm = constant_curvature(n, -1.0);
    EXPECT_EQ(weitzenboeck(Eigen::MatrixXd::Identity(n, n), rm).cwiseAbs().maxCoeff(), 0.0);
    CurvatureTensor gen = random_curvature(n, -1.0, 1.0, rng);
    EXPECT_LE(weitzenboeck(Eigen::MatrixXd::Identity(n, n), gen).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Weitzenboeck, ConstantCurvatureTracelessPairing) {
  std::mt19937_64 rng(5);
  for (int n = 3; n <= 5; ++n) {
    Eigen::MatrixXd h = random_symmetric(n, rng);
    h -= h.trace() / n * Eigen::MatrixXd::Identity(n, n);
    double kappa = -0.8;
    Eigen::MatrixXd w = weitzenboeck(h, constant_curvature(n, kappa));
    EXPECT_NEAR(0.5 * frame_inner(w, h), kappa * n * frame_inner(h, h), 1e-12);
  }
  Eigen::MatrixXd h = random_symmetric(3, rng);
  h -= h.trace() / 3.0 * Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd w = weitzenboeck(h, constant_curvature(3, -1.0));
  EXPECT_NEAR(0.5 * frame_inner(w, h), -3.0 * frame_inner(h, h), 1e-12);
}

TEST(Weitzenboeck, MatchesIndexLoopOracle) {
  std::mt19937_64 rng(17);
  for (int s = 0; s < 200; ++s) {
    int n = 3 + s % 3;
    CurvatureTensor rm = random_curvature(n, -1.0, 2.0, rng);
    Eigen::MatrixXd h = random_symmetric(n, rng);
    EXPECT_LE((weitzenboeck(h, rm) - naive_weitzenboeck(h, rm)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Weitzenboeck, RejectsMalformedInput) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(3, 3);
  h(0, 1) = 1.0;
  EXPECT_THROW(weitzenboeck(h, constant_curvature(3, -1.0)), ContractViolation);
  CurvatureTensor broken = constant_curvature(3, -1.0);
  broken(0, 1, 1, 0) = 5.0;
  EXPECT_THROW(weitzenboeck(Eigen::MatrixXd::Identity(3, 3), broken), ContractViolation);
}

TEST(RicPairingBound, ExactModelGivesZeroLhs) {
  std::mt19937_64 rng(23);
  for (int n = 3; n <= 5; ++n) {
    PairingBound pb = ric_pairing_bound(random_symmetric(n, rng), constant_curvature(n, -1.3), -1.3);
    EXPECT_LE(pb.lhs, 1e-12);
    EXPECT_TRUE(pb.holds());
  }
}

TEST(RicPairingBound, HoldsOnTenThousandRandomSamples) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int violations = 0;
  for (int s = 0; s < 10000; ++s) {
    int n = 3 + s % 3;
    double kappa = -0.5 - U(rng);
    CurvatureTensor rm = random_curvature(n, kappa, 0.1 * U(rng), rng);
    if (!ric_pairing_bound(random_symmetric(n, rng), rm, kappa).holds()) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(EinsteinOperator, SelfReferenceEqualsEinsteinResidual) {
  auto m = WarpedMetric::sample(RadialGrid::over(0.5, 3.5, 1e-3), MetricKind::generic, analytic);
  SymRadialTensor phi = einstein_operator(m, m);
  SymRadialTensor res = einstein_residual(m);
  double diff = (phi - res).sup_norm();
  EXPECT_LE(diff, 1e-12 * std::max(1.0, res.sup_norm()));
}

TEST(EinsteinOperator, VanishesOnHyperbolicTube) {
  auto m = hyperbolic_tube(0.05, 3.0).metric;
  EXPECT_LE(einstein_operator(m, m).sup_norm(), 1e-8);
}

TEST(Bianchi, VanishesWhenArgumentEqualsReference) {
  auto m = drilling_interpolation(4.0, CutoffProfile(), 1.0, 7.0);
  double worst = 0.0;
  for (const Vec3& v : bianchi(m, m)) worst = std::max(worst, v.norm());
  EXPECT_LE(worst, 1e-12);
}

TEST(Bianchi, ConformalFactorGivesHalfDerivative) {
  // beta(u g) = delta(u g) + 1/2 d tr(u g) = -du + 3/2 du
  auto ref = hyperbolic_cusp(0.0, 3.0);
  auto t = SymRadialTensor::from_function(ref.grid, [](double r) { return Mat3(std::sin(r) * Mat3::Identity()); });
  auto beta = bianchi(ref, t);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < ref.grid.n; ++i) {
    double r = ref.grid.r(i);
    worst = std::max({worst, std::abs(beta[i](2) - 0.5 * std::cos(r)), std::abs(beta[i](0)), std::abs(beta[i](1))});
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Bianchi, TrivialVariationIsDivergenceFree) {
  auto ref = hyperbolic_cusp(0.0, 3.0);
  TrivialEinsteinVariation u{0.3, -0.2, -0.3};
  auto beta = bianchi(ref, u.on(ref.grid));
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < ref.grid.n; ++i) worst = std::max(worst, beta[i].norm());
  EXPECT_LE(worst, 1e-10);
}

TEST(Bianchi, RejectsGridMismatch) {
  EXPECT_THROW(bianchi(hyperbolic_cusp(0.0, 3.0), hyperbolic_cusp(0.0, 4.0)), GridMismatch);
}

TEST(LinearizedEinstein, MetricMapsToTwiceItself) {
  auto m = hyperbolic_cusp(0.0, 4.0);
  auto g = SymRadialTensor::from_function(m.grid, [](double) { return Mat3(Mat3::Identity()); });
  auto lg = linearized_einstein(g, m);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < m.grid.n; ++i) worst = std::max(worst, (lg.at(i) - 2.0 * Mat3::Identity()).norm());
  EXPECT_LE(worst, 1e-10);
}

TEST(LinearizedEinstein, TrivialVariationInKernel) {
  auto m = hyperbolic_cusp(-2.0, 2.0);
  TrivialEinsteinVariation u{0.4, 0.1, -0.4};
  auto lu = linearized_einstein(u.on(m.grid), m);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < m.grid.n; ++i) worst = std::max(worst, lu.norm_at(i));
  EXPECT_LE(worst, 1e-10);
}

TEST(LinearizedEinstein, PureTraceReproducesTraceOde) {
  // tr h = e^{-r}: tr L h = -1/2 (y'' - 2y' - 4y) = e^{-r} / 2
  auto m = hyperbolic_cusp(0.0, 4.0);
  auto h = SymRadialTensor::from_function(m.grid, [](double r) { return Mat3(std::exp(-r) / 3.0 * Mat3::Identity()); });
  auto lh = linearized_einstein(h, m);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < m.grid.n; ++i)
    worst = std::max(worst, std::abs(lh.trace_at(i) - 0.5 * std::exp(-m.grid.r(i))));
  EXPECT_LE(worst, 1e-9);
}

TEST(LinearizedEinstein, MatchesDirectionalDifferenceOfPhi) {
  auto m = hyperbolic_cusp(0.0, 3.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 3; ++trial) {
    double c[6][2];
    for (auto& row : c)
      for (double& x : row) x = N(rng);
    auto h = SymRadialTensor::from_function(m.grid, [&](double r) {
      Mat3 out;
      for (int k = 0; k < 6; ++k) {
        auto [p, q] = kCompIndex[k];
        out(p, q) = out(q, p) = c[k][0] * std::sin(1.3 * r + c[k][1]) * std::exp(-0.5 * r);
      }
      return out;
    });
    const double t = 1e-5;
    auto plus = einstein_operator_perturbed(m, t * h);
    auto minus = einstein_operator_perturbed(m, (-t) * h);
    auto fd = (1.0 / (2.0 * t)) * (plus - minus);
    auto lh = linearized_einstein(h, m);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 4; i + 4 < m.grid.n; ++i) {
      err = std::max(err, (fd.at(i) - lh.at(i)).norm());
      scale = std::max(scale, lh.norm_at(i));
    }
    EXPECT_LE(err / scale, 1e-6);
  }
}

TEST(LinearizedEinstein, AgreesWithCuspBlockOperator) {
  auto m = hyperbolic_cusp(0.0, 3.0);
  auto h = SymRadialTensor::from_function(m.grid, [](double r) {
    Mat3 out;
    out << std::sin(r), 0.2 * r, std::cos(2 * r), 0.2 * r, std::exp(-r), 0.1, std::cos(2 * r), 0.1, r * r / 9.0;
    return out;
  });
  auto a = linearized_einstein(h, m);
  auto b = cusp_operator(h);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < m.grid.n; ++i) worst = std::max(worst, (a.at(i) - b.at(i)).norm());
  EXPECT_LE(worst, 1e-8);
}

TEST(WarpedMetric, StoredDerivativesPassConsistencyCheck) {
  std::vector<WarpedMetric> all{hyperbolic_tube(0.05, 3.0).metric, hyperbolic_cusp(0.0, 5.0), expanding_cusp(0.0, 5.0),
                                flat_product(0.0, 5.0), drilling_interpolation(5.0, CutoffProfile(), 2.0, 8.0),
                                filling_interpolation(5.0, CutoffProfile(), 2.0, 8.0)};
  for (const auto& m : all) EXPECT_TRUE(check_derivative_consistency(m).ok());
}

TEST(Grid, SimpsonAndStencilsAreExactOnPolynomials) {
  auto g = RadialGrid::over(0.0, 1.0, 1e-2);
  std::vector<double> f(g.n);
  for (std::size_t i = 0; i < g.n; ++i) f[i] = std::pow(g.r(i), 3);
  EXPECT_NEAR(simpson(f, g.step), 0.25, 1e-14);
  auto df = d1(f, g.step);
  auto ddf = d2(f, g.step);
  for (std::size_t i = 2; i + 2 < g.n; ++i) {
    EXPECT_NEAR(df[i], 3 * g.r(i) * g.r(i), 1e-10);
    EXPECT_NEAR(ddf[i], 6 * g.r(i), 1e-8);
  }
  std::vector<double> odd(g.n - 1);
  for (std::size_t i = 0; i + 1 < g.n; ++i) odd[i] = g.r(i) * g.r(i);
  double end = g.r(g.n - 2);
  EXPECT_NEAR(simpson(odd, g.step), end * end * end / 3.0, 1e-14);
}
