#include "pinchlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "pinchlab/comparison.hpp"
#include "pinchlab/cusp_ode.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/pointwise.hpp"
#include "pinchlab/solver.hpp"
#include "pinchlab/uniformization.hpp"

namespace pinchlab {

bool CriterionReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Builder {
  CriterionReport rep;
  void le(const std::string& name, double value, double threshold) { rep.checks.push_back({name, value, Relation::le, threshold}); }
  void ge(const std::string& name, double value, double threshold) { rep.checks.push_back({name, value, Relation::ge, threshold}); }
  void runtime(const std::string& name, double value, double limit) {
    rep.checks.push_back({name, value, Relation::le, limit, true});
  }
  void log(const std::string& name, double value) { rep.logged.emplace_back(name, value); }
  void note(const std::string& text) { rep.notes.push_back(text); }
};

std::mt19937_64 criterion_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

std::size_t scaled(std::size_t n, const AcceptanceConfig& cfg) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.sample_scale)));
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double max_interior(const SymRadialTensor& t, std::size_t skip) {
  double m = 0.0;
  for (std::size_t i = skip; i + skip < t.grid.n; ++i) m = std::max(m, t.norm_at(i));
  return m;
}

// ---------------------------------------------------------------------------

void constant_curvature_oracle(Builder& b) {
  auto run = [&](const std::string& name, double kappa, auto make) {
    auto t0 = Clock::now();
    WarpedMetric m = make();
    double dev = curvature_of_warped(m, kappa).sup_sec_deviation(kappa);
    double dt = seconds_since(t0);
    b.le(name + "_sup_sec_deviation", dev, 1e-8);
    b.runtime(name + "_runtime_s", dt, 1.0);
  };
  run("tube", -1.0, [] { return hyperbolic_tube(0.05, 5.0, 1e-3, 0.1).metric; });
  run("cusp", -1.0, [] { return hyperbolic_cusp(0.0, 10.0, 1e-3); });
  run("expanding_cusp", -1.0, [] { return expanding_cusp(0.0, 10.0, 1e-3); });
  run("flat_product", 0.0, [] { return flat_product(0.0, 10.0, 1e-3); });
}

void interpolation_decay(Builder& b) {
  auto t0 = Clock::now();
  const CutoffProfile sigma;
  const std::vector<double> Rs{4, 5, 6, 7, 8};
  for (int kind = 0; kind < 2; ++kind) {
    const std::string name = kind == 0 ? "drilling" : "filling";
    std::vector<double> logs;
    double outside = 0.0;
    for (double R : Rs) {
      WarpedMetric m = kind == 0 ? drilling_interpolation(R, sigma, R - 3.0, R + 3.0, 1e-3)
                                 : filling_interpolation(R, sigma, R - 3.0, R + 3.0, 1e-3);
      CurvatureData cd = curvature_of_warped(m, -1.0);
      double sup = cd.sup_sec_deviation(-1.0);
      for (std::size_t i = 0; i < m.grid.n; ++i) {
        double r = m.grid.r(i);
        if (r <= R - 1.0 || r >= R) outside = std::max(outside, cd.dev_kappa[i]);
      }
      b.log(name + "_sup_sec_deviation_R" + std::to_string(static_cast<int>(R)), sup);
      logs.push_back(std::log(sup));
    }
    double slope = fit_slope(Rs, logs);
    b.log(name + "_slope", slope);
    b.le(name + "_slope_error", std::abs(slope + 2.0), 0.1);
    b.le(name + "_outside_transition_deviation", outside, 1e-8);
  }
  b.runtime("runtime_s", seconds_since(t0), 10.0);
}

void ode_exponents(Builder& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.5, 10.0);
  const RadialGrid right = RadialGrid::over(0.0, 10.0, 1e-3), left = RadialGrid::over(-10.0, 0.0, 1e-3);
  const std::vector<double> zero(right.n, 0.0);
  double worst = 0.0;
  for (BlockTag tag : {BlockTag::trace, BlockTag::h33, BlockTag::hi3, BlockTag::hij}) {
    OdeBlock q = OdeBlock::of(tag);
    double c1 = U(rng), c2 = U(rng);
    // y = c1 e^{l1 r} + c2 e^{l2 r}, integrated from the data at the left end of each window
    auto start = [&](double r0) {
      return std::pair{c1 * std::exp(q.lambda1 * r0) + c2 * std::exp(q.lambda2 * r0),
                       q.lambda1 * c1 * std::exp(q.lambda1 * r0) + q.lambda2 * c2 * std::exp(q.lambda2 * r0)};
    };
    auto [y0r, dy0r] = start(right.r_min);
    auto [y0l, dy0l] = start(left.r_min);
    auto yr = solve_block(q, right, zero, y0r, dy0r);
    auto yl = solve_block(q, left, zero, y0l, dy0l);
    double up = fit_growth_exponent(right, yr, 7.0, 10.0, Tail::right).slope;
    double down = fit_growth_exponent(left, yl, -10.0, -7.0, Tail::left).slope;
    // closed-form roots of X^2 + bX + c as the oracle
    double disc = std::sqrt(q.b * q.b - 4.0 * q.c);
    double r1 = 0.5 * (-q.b + disc), r2 = 0.5 * (-q.b - disc);
    worst = std::max({worst, std::abs(up - r1), std::abs(down - r2)});
    b.log(to_string(tag) + "_growing_exponent", up);
    b.log(to_string(tag) + "_decaying_exponent", down);
  }
  b.le("max_exponent_error", worst, 1e-2);

  std::normal_distribution<double> N;
  const WarpedMetric cusp = hyperbolic_cusp(-2.0, 2.0, 1e-3);
  double lu = 0.0;
  for (int k = 0; k < 8; ++k) {
    double d = N(rng);
    TrivialEinsteinVariation u{d, N(rng), -d};
    lu = std::max(lu, max_interior(linearized_einstein(u.on(cusp.grid), cusp), 2) / u.norm());
  }
  b.le("trivial_variation_residual", lu, 1e-10);
}

void algebraic_estimate(Builder& b, std::mt19937_64& rng, const AcceptanceConfig& cfg) {
  const std::size_t samples = scaled(10000, cfg);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N;
  std::size_t violations = 0;
  double worst_ratio = 0.0, weitzenboeck_metric = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    int n = 3 + static_cast<int>(s % 3);
    double kappa = -0.5 - U(rng);
    CurvatureTensor rm = random_curvature(n, kappa, 2.0 * U(rng), rng);
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) h(i, j) = h(j, i) = N(rng);
    PairingBound pb = ric_pairing_bound(h, rm, kappa);
    if (!pb.holds()) ++violations;
    if (pb.rhs > 0.0) worst_ratio = std::max(worst_ratio, pb.lhs / pb.rhs);
    Eigen::MatrixXd w = weitzenboeck(Eigen::MatrixXd::Identity(n, n), rm);
    weitzenboeck_metric = std::max(weitzenboeck_metric, w.cwiseAbs().maxCoeff() / std::max(1.0, rm.norm()));
  }
  b.log("samples", static_cast<double>(samples));
  b.log("max_lhs_over_rhs", worst_ratio);
  b.le("violations", static_cast<double>(violations), 0.0);
  b.le("weitzenboeck_of_metric", weitzenboeck_metric, 1e-13);
}

// Single constants of the two comparison lemmas. Over seeds 1, 2, 3, 7 and 11 both maxima sit at
// t = 0 where the bounds hold with equality; the slack covers the integrator tolerance.
constexpr double kGronwallConstant = 1.0 + 1e-6;
constexpr double kStabilityConstant = 1.0 + 1e-6;

void comparison_lemmas(Builder& b, std::mt19937_64& rng, const AcceptanceConfig& cfg) {
  const std::size_t samples = scaled(1000, cfg);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  auto random_matrix = [&](int n) {
    Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return U(rng); });
    return Eigen::MatrixXd(M / operator_norm(M));
  };
  auto random_unit = [&](int n) {
    Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(n, [&] { return U(rng); });
    return Eigen::VectorXd(v.normalized());
  };

  // Groenwall: |y'| <= sigma |y| + kappa e^{lambda t} for y' = A y + b with ||A|| <= sigma, |b| <= kappa e^{lambda t}
  std::vector<LinearSystem> gsys(samples);
  std::vector<std::pair<double, GronwallTerm>> gpar(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    int n = 2 + static_cast<int>(k % 3);
    double sigma = 0.2 + P(rng);
    Eigen::MatrixXd M1 = 0.5 * random_matrix(n), M2 = 0.5 * random_matrix(n);
    double w = 1.0 + 3.0 * P(rng), kap = P(rng), lam = sigma + 0.1 + P(rng);
    Eigen::VectorXd u = random_unit(n);
    LinearSystem& s = gsys[k];
    s.T = 3.0;
    s.y0 = Eigen::VectorXd::NullaryExpr(n, [&] { return U(rng); });
    s.A = [=](double t) { return Eigen::MatrixXd(sigma * (std::cos(w * t) * M1 + std::sin(w * t) * M2)); };
    s.b = [=](double t) { return Eigen::VectorXd(kap * std::exp(lam * t) * std::cos(3.0 * t) * u); };
    gpar[k] = {sigma, GronwallTerm{kap, lam}};
  }
  std::vector<double> gratio(samples, 0.0);
  parallel_for(samples, [&](std::size_t k) {
    Trajectory tr = integrate(gsys[k], uniform_times(gsys[k].T, 301));
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      double bound = gronwall_bound(gpar[k].first, gsys[k].y0.norm(), {gpar[k].second}, tr.t[i]);
      gratio[k] = std::max(gratio[k], tr.y[i].norm() / bound);
    }
  });
  b.log("gronwall_instances", static_cast<double>(samples));
  b.le("gronwall_max_ratio", *std::max_element(gratio.begin(), gratio.end()), kGronwallConstant);

  // Stability: perturbations of size eps e^{eta(t-T)} of a bounded system, forcings with exponential envelopes
  struct Instance {
    LinearSystem sys, bar;
    StabilityHypotheses hyp;
  };
  std::vector<Instance> inst(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    int n = 1 + static_cast<int>(k % 4);
    double alpha = 0.2 + 0.8 * P(rng), w = 0.5 + 2.0 * P(rng);
    Eigen::MatrixXd M1 = 0.5 * random_matrix(n), M2 = 0.5 * random_matrix(n), Pm = random_matrix(n);
    StabilityHypotheses h;
    h.eps = std::pow(10.0, -3.0 + 2.0 * P(rng));
    h.eta = h.eps + 0.2 + 2.0 * P(rng);
    double T = 2.0 + 6.0 * P(rng);
    bool forced = k % 2 == 1;
    h.beta_bar = forced ? P(rng) : 0.0;
    h.mu_bar = alpha + h.eps + 0.2 + P(rng);
    h.beta = forced ? 1e-3 * P(rng) : 0.0;
    h.mu = alpha + h.eps + 0.2 + P(rng);
    Eigen::VectorXd u = random_unit(n), v = random_unit(n);
    Instance& in = inst[k];
    in.hyp = h;
    in.bar.T = in.sys.T = T;
    in.bar.y0 = Eigen::VectorXd::NullaryExpr(n, [&] { return U(rng); });
    in.sys.y0 = in.bar.y0 + 1e-3 * P(rng) * random_unit(n);
    in.bar.A = [=](double t) { return Eigen::MatrixXd(alpha * (std::cos(w * t) * M1 + std::sin(w * t) * M2)); };
    in.sys.A = [=](double t) {
      return Eigen::MatrixXd(alpha * (std::cos(w * t) * M1 + std::sin(w * t) * M2) +
                             h.eps * std::exp(h.eta * (t - T)) * std::cos(2.0 * t) * Pm);
    };
    if (forced) {
      in.bar.b = [=](double t) { return Eigen::VectorXd(h.beta_bar * std::exp(h.mu_bar * t) * std::sin(t + 1.0) * u); };
      in.sys.b = [=](double t) {
        return Eigen::VectorXd(h.beta_bar * std::exp(h.mu_bar * t) * std::sin(t + 1.0) * u +
                               h.beta * std::exp(h.mu * t) * std::cos(t) * v);
      };
    }
  }
  std::vector<double> sratio(samples, 0.0), implied(samples, 0.0);
  std::vector<int> implied_violation(samples, 0);
  parallel_for(samples, [&](std::size_t k) {
    ComparisonResult r = compare_solutions(inst[k].sys, inst[k].bar, inst[k].hyp);
    sratio[k] = r.max_ratio;
    implied[k] = r.implied_constant;
    implied_violation[k] = r.max_ratio > r.implied_constant * (1.0 + 1e-9);
  });
  b.log("stability_instances", static_cast<double>(samples));
  b.log("stability_max_implied_constant", *std::max_element(implied.begin(), implied.end()));
  b.le("stability_max_ratio", *std::max_element(sratio.begin(), sratio.end()), kStabilityConstant);
  b.le("stability_implied_constant_violations",
       static_cast<double>(std::count(implied_violation.begin(), implied_violation.end(), 1)), 0.0);

  auto R = [](double) { return Eigen::MatrixXd::Constant(1, 1, -1.0); };
  JacobiField js = jacobi_solve(R, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), 5.0);
  JacobiField jc = jacobi_solve(R, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1), 5.0);
  double es = 0.0, ec = 0.0;
  for (std::size_t i = 1; i < js.t.size(); ++i) {
    es = std::max(es, std::abs(js.J[i](0) / std::sinh(js.t[i]) - 1.0));
    ec = std::max(ec, std::abs(jc.J[i](0) / std::cosh(jc.t[i]) - 1.0));
  }
  b.le("jacobi_sinh_relative_error", es, 1e-8);
  b.le("jacobi_cosh_relative_error", ec, 1e-8);
}

void fixed_point(Builder& b) {
  auto t0 = Clock::now();
  const std::vector<double> Rs{4, 5, 6};
  std::vector<double> logs;
  BanachResult last;
  for (double R : Rs) {
    WarpedMetric g = drilling_interpolation(R, CutoffProfile(), R - 3.5, R + 3.0, 1e-3);
    BanachResult res = banach_iterate(g);
    std::string tag = "_R" + std::to_string(static_cast<int>(R));
    b.log("c2_distance" + tag, res.c2_distance);
    b.log("initial_sec_deviation" + tag, res.initial_sec_deviation);
    b.log("final_sec_deviation" + tag, res.sup_sec_deviation);
    b.log("iterations" + tag, static_cast<double>(res.trace.size()));
    logs.push_back(std::log(res.c2_distance));
    last = std::move(res);
  }
  b.ge("converged_R6", last.converged ? 1.0 : 0.0, 1.0);
  b.le("max_contraction_ratio_R6", last.max_ratio, 0.5);
  b.le("final_sec_deviation_R6", last.sup_sec_deviation, 1e-6);
  b.le("c2_distance_slope", fit_slope(Rs, logs), -1.8);
  b.runtime("runtime_s", seconds_since(t0), 60.0);
}

SymRadialTensor decaying_forcing(const RadialGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  double co[6][3];
  for (auto& row : co)
    for (double& x : row) x = N(rng);
  return SymRadialTensor::from_function(grid, [&](double r) {
    Mat3 m;
    for (int k = 0; k < 6; ++k) {
      auto [p, q] = kCompIndex[k];
      double v = co[k][0] * std::exp(-r) * std::sin(co[k][1] * r) + co[k][2] * std::exp(-1.5 * r);
      m(p, q) = m(q, p) = v;
    }
    return m;
  });
}

void inversion_consistency(Builder& b, std::mt19937_64& rng, const AcceptanceConfig& cfg) {
  const std::size_t samples = scaled(100, cfg);
  const WarpedMetric cusp = hyperbolic_cusp(0.0, 10.0, 1e-2);
  std::vector<SymRadialTensor> fs;
  for (std::size_t k = 0; k < samples; ++k) fs.push_back(decaying_forcing(cusp.grid, rng));
  LinearizedInverse inv(cusp);
  const NormConfig nc;
  std::vector<double> resid(samples), ratio(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    // decaying data: zero trace-free end values are consistent with f -> 0
    SymRadialTensor h = inv.solve(fs[k], Mat3::Zero(), Mat3::Zero());
    SymRadialTensor back = linearized_einstein(h, cusp) - fs[k];
    resid[k] = max_interior(back, 1);
    ratio[k] = hybrid_norms(h, cusp, nc).hybrid_2 / hybrid_norms(fs[k], cusp, nc).hybrid_0;
  }
  b.log("forcings", static_cast<double>(samples));
  b.log("min_ratio", *std::min_element(ratio.begin(), ratio.end()));
  b.le("max_round_trip_residual", *std::max_element(resid.begin(), resid.end()), 1e-8);
  b.le("max_apriori_ratio", *std::max_element(ratio.begin(), ratio.end()), calibrated_inverse_constant());
}

void integral_inequalities(Builder& b, std::mt19937_64& rng, const AcceptanceConfig& cfg) {
  const std::size_t samples = scaled(1000, cfg);
  const WarpedMetric cusp = hyperbolic_cusp(0.0, 12.0, 1e-2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N;
  struct Bump {
    double c, w;
    Mat3 A;
  };
  std::vector<Bump> bumps(samples);
  for (auto& bp : bumps) {
    bp.c = 2.0 + 8.0 * U(rng);
    bp.w = std::min({0.3 + 3.0 * U(rng), bp.c - 0.1, 11.9 - bp.c});
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) bp.A(i, j) = bp.A(j, i) = N(rng);
    bp.A -= bp.A.trace() / 3.0 * Mat3::Identity();
  }
  std::vector<double> ray(samples), margin(samples);
  parallel_for(samples, [&](std::size_t k) {
    const Bump& bp = bumps[k];
    auto h = SymRadialTensor::from_function(cusp.grid, [&](double r) {
      double u = (r - bp.c) / bp.w;
      double v = std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
      return Mat3(v * bp.A);
    });
    IntegralReport ir = integral_inequality_checks(h, cusp);
    ray[k] = ir.rayleigh;
    margin[k] = ir.first_margin / ir.h_sq;
  });
  b.log("samples", static_cast<double>(samples));
  b.ge("min_rayleigh_quotient", *std::min_element(ray.begin(), ray.end()), 3.0 - 1e-3);
  b.ge("min_first_inequality_margin", *std::min_element(margin.begin(), margin.end()), -1e-8);
}

void effective_uniformization(Builder& b, std::mt19937_64& rng) {
  const Lattice2D unit;
  const std::size_t n = 64;
  auto profile = [](double amp) {
    return [amp](const Eigen::Vector2d& x) {
      double p = 2.0 * std::numbers::pi;
      return amp * (std::sin(p * x(0)) + 0.5 * std::cos(p * (x(0) + x(1))) + 0.3 * std::sin(2.0 * p * x(1)));
    };
  };
  double gb = 0.0, worst_ratio = 0.0, min_ratio = 1e300, recovery = 0.0;
  for (double amp : {0.1, 0.05, 0.01}) {
    TorusGrid rho = TorusGrid::from_function(unit, n, n, profile(amp));
    GaussCurvature gc = gauss_curvature(rho);
    RecoveredRho rec = recover_rho(gc.K);
    double err = 0.0;
    for (std::size_t j = 0; j < rho.values.size(); ++j) err = std::max(err, std::abs(rec.rho.values[j] - rho.values[j]));
    if (amp == 0.05) recovery = err;
    double ratio = rec.rho.sup() / gc.K.sup();
    gb = std::max(gb, std::abs(gc.gauss_bonnet));
    worst_ratio = std::max(worst_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
    std::string tag = amp == 0.1 ? "_a0.1" : amp == 0.05 ? "_a0.05" : "_a0.01";
    b.log("rho_over_K" + tag, ratio);
    b.log("picard_iterations" + tag, rec.iterations);
  }
  b.le("recovery_error_a0.05", recovery, 1e-6);
  b.le("max_gauss_bonnet", gb, 1e-8);
  // one constant for all amplitudes
  b.le("max_rho_over_K", worst_ratio, calibrated_uniformization_constant());
  b.log("min_rho_over_K", min_ratio);

  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  double worst_gap = 1e300;
  for (int k = 0; k < 50; ++k) {
    double s = 0.05 + 2.0 * P(rng);
    Lattice2D lat{{s, 0.0}, {U(rng) * s, s * (0.3 + 2.0 * P(rng))}};
    double D = lat.diameter();
    worst_gap = std::min(worst_gap, first_eigenvalue(lat, 32, 32) / spectral_gap_bound(D, 2));
  }
  b.ge("min_lambda1_over_bound", worst_gap, 1.0);
}

// Brute-force oracle: all coefficient pairs inside the box given by the dual basis.
std::int64_t enumerate_points(const Lattice2D& lat, double radius) {
  Eigen::Matrix2d Binv = lat.basis().inverse();
  auto m1 = static_cast<std::int64_t>(std::ceil(radius * Binv.row(0).norm()));
  auto m2 = static_cast<std::int64_t>(std::ceil(radius * Binv.row(1).norm()));
  std::int64_t count = 0;
  for (std::int64_t i = -m1; i <= m1; ++i)
    for (std::int64_t j = -m2; j <= m2; ++j) {
      Eigen::Vector2d x = static_cast<double>(i) * lat.v1 + static_cast<double>(j) * lat.v2;
      if (x.squaredNorm() <= radius * radius * (1.0 + 1e-12)) ++count;
    }
  return count;
}

void counting_and_sums(Builder& b, std::mt19937_64& rng, const AcceptanceConfig& cfg) {
  const std::size_t samples = scaled(1000, cfg);
  const SmallPartConstants k;
  std::uniform_real_distribution<double> P(0.0, 1.0);
  std::size_t mismatches = 0, admissible = 0, attempts = 0;
  double worst = 0.0;
  while (admissible < samples && attempts < 100 * samples) {
    ++attempts;
    double s = std::pow(10.0, -3.0 + 2.3 * P(rng));
    double th = 2.0 * std::numbers::pi * P(rng), ph = th + 0.3 + 2.5 * P(rng);
    double L = 0.1 + 1.5 * P(rng);
    Lattice2D lat{{s * std::cos(th), s * std::sin(th)}, {L * std::cos(ph), L * std::sin(ph)}};
    double radius = k.D * P(rng);
    PreimageCount pc = lattice_preimage_count(lat, radius, k);
    if (!pc.preconditions_met) continue;
    ++admissible;
    if (pc.count != enumerate_points(lat, radius)) ++mismatches;
    worst = std::max(worst, static_cast<double>(pc.count) * pc.inj);
  }
  b.log("lattices", static_cast<double>(admissible));
  b.log("count_constant", k.count_constant());
  b.ge("admissible_lattices", static_cast<double>(admissible), static_cast<double>(samples));
  b.le("count_mismatches", static_cast<double>(mismatches), 0.0);
  b.le("max_count_times_inj", worst, k.count_constant());

  std::size_t violations = 0;
  double worst_sum = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    double delta = 1.5 * P(rng), kp = (2.0 - delta) * (0.05 + 0.9 * P(rng)), m = 1.0 + 4.0 * P(rng);
    std::size_t count = 1 + static_cast<std::size_t>(200.0 * P(rng));
    std::vector<double> d;
    double prev = 3.0 * P(rng);
    for (std::size_t i = 0; i < count; ++i) {
      // smallest distance allowed by #{d <= r} <= m e^{kp r}
      double floor = std::max(0.0, std::log(static_cast<double>(i + 1) / m) / kp);
      prev = std::max(prev + (P(rng) < 0.3 ? 0.0 : 0.5 * P(rng)), floor);
      d.push_back(prev);
    }
    SparsityResult sr = sparsity_sum(d, delta, kp, m);
    if (!sr.holds()) ++violations;
    worst_sum = std::max(worst_sum, sr.sum / sr.bound);
  }
  b.log("sparsity_instances", static_cast<double>(samples));
  b.log("max_sum_over_bound", worst_sum);
  b.le("sparsity_violations", static_cast<double>(violations), 0.0);
}

void obstruction(Builder& b) {
  const double lambda = 1.0, m = 2.0, R = 1.0;
  std::vector<double> eps;
  double worst_stretch = 0.0, worst_collar = 0.0, worst_deficit = 0.0, worst_eps_ratio = 0.0, worst_hyp = 0.0;
  for (double delta : {0.04, 0.02, 0.01}) {
    CounterexampleParams p;
    p.delta = delta;
    p.R = R;
    p.m = m;
    Counterexample c = counterexample_metric(p);
    RicciDeficit rd = weighted_ricci_deficit(c.metric, c.tube, lambda, m);
    CurvatureData cd = curvature_of_warped(c.metric, -1.0);
    const double rad = c.tube.radius;
    for (std::size_t i = 0; i < c.metric.grid.n; ++i) {
      double depth = rad - c.metric.grid.r(i);
      if (depth <= m || depth >= m + c.bump.support_end()) worst_collar = std::max(worst_collar, cd.dev_kappa[i]);
    }
    eps.push_back(rd.eps);
    worst_stretch = std::max(worst_stretch, std::abs(c.stretch_factor / std::exp(R) - 1.0));
    worst_deficit = std::max(worst_deficit, rd.value / rd.bound);
    worst_eps_ratio = std::max(worst_eps_ratio, rd.eps / delta);
    worst_hyp = std::max(worst_hyp, rd.eps / (lambda / 8.0));
    std::string tag = delta == 0.04 ? "_d0.04" : delta == 0.02 ? "_d0.02" : "_d0.01";
    b.log("eps" + tag, rd.eps);
    b.log("deficit" + tag, rd.value);
    b.log("deficit_bound" + tag, rd.bound);
    b.log("tube_radius" + tag, rad);
  }
  b.le("max_stretch_relative_error", worst_stretch, 1e-12);
  b.le("max_deviation_outside_deformation", worst_collar, 1e-8);
  b.le("eps_over_lambda_bound", worst_hyp, 1.0);
  b.le("max_eps_over_delta", worst_eps_ratio, 2.5);
  // halving delta must shrink eps
  b.le("max_eps_ratio_when_halving_delta", std::max(eps[1] / eps[0], eps[2] / eps[1]), 0.6);
  b.le("max_deficit_over_bound", worst_deficit, 1.0);

  // the nonlinear solve on the deformation region, recorded only
  CounterexampleParams p;
  p.delta = 0.02;
  p.R = R;
  p.m = m;
  p.step = 1e-2;
  Counterexample c = counterexample_metric(p);
  const double rad = c.tube.radius;
  WarpedMetric window = c.metric.restricted(c.metric.grid.nearest(rad - m - c.bump.support_end() - 1.0),
                                            c.metric.grid.nearest(rad - m + 1.0));
  try {
    BanachResult res = banach_iterate(window);
    b.log("banach_converged", res.converged ? 1.0 : 0.0);
    b.log("banach_initial_residual", res.initial_residual);
    b.log("banach_final_residual", res.final_residual);
    b.log("banach_iterations", static_cast<double>(res.trace.size()));
    b.log("banach_max_ratio", res.max_ratio);
    b.note(res.converged ? "banach iteration converged on the deformation window"
                         : "banach iteration stopped without convergence on the deformation window");
  } catch (const Error& e) {
    b.log("banach_converged", 0.0);
    b.note(std::string("banach iteration aborted: ") + e.what());
  }
}

}  // namespace

std::string criterion_key(int id) {
  static const char* keys[] = {"constant-curvature-oracle", "interpolation-pinching-decay", "ode-exponents",
                               "algebraic-curvature-estimate", "comparison-lemmas", "fixed-point",
                               "inversion-consistency", "integral-inequalities", "effective-uniformization",
                               "counting-and-sums", "counterexample-obstruction"};
  if (id < 1 || id > kCriterionCount) throw DomainError("criterion id must lie in 1.." + std::to_string(kCriterionCount));
  return keys[id - 1];
}

CriterionReport run_criterion(int id, const AcceptanceConfig& cfg) {
  Builder b;
  b.rep.id = id;
  b.rep.key = criterion_key(id);
  if (!(cfg.sample_scale > 0.0)) throw DomainError("acceptance: sample scale must be positive");
  std::mt19937_64 rng = criterion_rng(cfg.seed, id);
  auto t0 = Clock::now();
  switch (id) {
    case 1:
      b.rep.title = "model metrics have constant curvature";
      constant_curvature_oracle(b);
      break;
    case 2:
      b.rep.title = "interpolation pinching decays like e^{-2R}";
      interpolation_decay(b);
      break;
    case 3:
      b.rep.title = "cusp ODE exponents and trivial variations";
      ode_exponents(b, rng);
      break;
    case 4:
      b.rep.title = "pairing estimate for Ric(h)";
      algebraic_estimate(b, rng, cfg);
      break;
    case 5:
      b.rep.title = "Groenwall, ODE stability and Jacobi fields";
      comparison_lemmas(b, rng, cfg);
      break;
    case 6:
      b.rep.title = "Banach iteration on the drilling interpolation";
      fixed_point(b);
      break;
    case 7:
      b.rep.title = "inversion of the linearized operator";
      inversion_consistency(b, rng, cfg);
      break;
    case 8:
      b.rep.title = "Poincare and first integral inequality on the cusp";
      integral_inequalities(b, rng, cfg);
      break;
    case 9:
      b.rep.title = "effective uniformization on the torus";
      effective_uniformization(b, rng);
      break;
    case 10:
      b.rep.title = "lattice counting and sparsity sums";
      counting_and_sums(b, rng, cfg);
      break;
    case 11:
      b.rep.title = "counterexample family satisfies the hypotheses and stretches by e^R";
      obstruction(b);
      break;
  }
  b.rep.seconds = seconds_since(t0);
  return b.rep;
}

std::vector<CriterionReport> run_acceptance(const AcceptanceConfig& cfg, const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
  std::vector<CriterionReport> out;
  for (int id : todo) out.push_back(run_criterion(id, cfg));
  return out;
}

}  // namespace pinchlab
