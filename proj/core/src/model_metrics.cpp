#include "pinchlab/model_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {

// 6u^5 - 15u^4 + 10u^3 on [0,1] and its derivatives.
double smoother(double u) { return u * u * u * (u * (6 * u - 15) + 10); }
double smoother_d1(double u) { return 30 * u * u * (u - 1) * (u - 1); }
double smoother_d2(double u) { return 60 * u * (2 * u * u - 3 * u + 1); }
double smoother_antiderivative(double u) { return u * u * u * u * (u * (u - 3) + 2.5); }

double smooth(double u) { return u * u * (3 - 2 * u); }
double smooth_d1(double u) { return 6 * u * (1 - u); }
double smooth_d2(double u) { return 6 - 12 * u; }

// psi(u) = 1 / (1 + exp(-z)), z = k((1-u)^{-1/2} - u^{-1/2}); flat to all orders at 0 and 1.
constexpr double kFlatK = 2.5;

struct FlatStep {
  double v, d1, d2;
};

FlatStep flat_step(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double a = 1.0 / std::sqrt(u), b = 1.0 / std::sqrt(1.0 - u);
  const double z = kFlatK * (b - a);
  const double z1 = 0.5 * kFlatK * (b * b * b + a * a * a);
  const double z2 = 0.75 * kFlatK * (b * b * b * b * b - a * a * a * a * a);
  double v, w;  // w = psi (1 - psi)
  if (z >= 0.0) {
    double e = std::exp(-z);
    v = 1.0 / (1.0 + e);
    w = e / ((1.0 + e) * (1.0 + e));
  } else {
    double e = std::exp(z);
    v = e / (1.0 + e);
    w = e / ((1.0 + e) * (1.0 + e));
  }
  if (w == 0.0) return {v, 0.0, 0.0};
  return {v, w * z1, w * (z2 + (1.0 - 2.0 * v) * z1 * z1)};
}

}  // namespace

CutoffProfile::CutoffProfile(Shape shape) : shape_(shape) {}

std::string CutoffProfile::name() const {
  switch (shape_) {
    case Shape::flat: return "flat";
    case Shape::smootherstep: return "smootherstep";
    case Shape::smoothstep2: return "smoothstep2";
  }
  return "flat";
}

double CutoffProfile::value(double t) const {
  if (t <= -1.0) return 1.0;
  if (t >= 0.0) return 0.0;
  double u = -t;
  if (shape_ == Shape::flat) return flat_step(u).v;
  if (shape_ == Shape::smootherstep) return smoother(u);
  return smooth(smooth(u));
}

double CutoffProfile::d1(double t) const {
  if (t <= -1.0 || t >= 0.0) return 0.0;
  double u = -t;
  if (shape_ == Shape::flat) return -flat_step(u).d1;
  if (shape_ == Shape::smootherstep) return -smoother_d1(u);
  return -smooth_d1(smooth(u)) * smooth_d1(u);
}

double CutoffProfile::d2(double t) const {
  if (t <= -1.0 || t >= 0.0) return 0.0;
  double u = -t;
  if (shape_ == Shape::flat) return flat_step(u).d2;
  if (shape_ == Shape::smootherstep) return smoother_d2(u);
  double s = smooth(u), s1 = smooth_d1(u);
  return smooth_d2(s) * s1 * s1 + smooth_d1(s) * smooth_d2(u);
}

double CutoffProfile::max_d1() const {
  double m = 0.0;
  for (int k = 0; k <= 20000; ++k) m = std::max(m, std::abs(d1(-k / 20000.0)));
  return m;
}

double CutoffProfile::max_d2() const {
  double m = 0.0;
  for (int k = 1; k < 20000; ++k) m = std::max(m, std::abs(d2(-k / 20000.0)));
  return m;
}

BumpProfile::BumpProfile(double delta, double R, double ramp) : delta_(delta), R_(R), ramp_(ramp) {
  if (!(delta > 0.0) || !(R > 0.0) || !(ramp > 0.0)) throw DomainError("bump: delta, R and ramp must be positive");
  plateau_ = R / delta - ramp;
  if (plateau_ < 0.0) throw DomainError("bump: R/delta must be at least the ramp width");
}

double BumpProfile::value(double t) const {
  const double end = support_end();
  if (t <= 0.0 || t >= end) return 0.0;
  if (t < ramp_) return delta_ * smoother(t / ramp_);
  if (t <= ramp_ + plateau_) return delta_;
  return delta_ * smoother((end - t) / ramp_);
}

double BumpProfile::d1(double t) const {
  const double end = support_end();
  if (t <= 0.0 || t >= end) return 0.0;
  if (t < ramp_) return delta_ / ramp_ * smoother_d1(t / ramp_);
  if (t <= ramp_ + plateau_) return 0.0;
  return -delta_ / ramp_ * smoother_d1((end - t) / ramp_);
}

double BumpProfile::d2(double t) const {
  const double end = support_end();
  if (t <= 0.0 || t >= end) return 0.0;
  if (t < ramp_) return delta_ / (ramp_ * ramp_) * smoother_d2(t / ramp_);
  if (t <= ramp_ + plateau_) return 0.0;
  return delta_ / (ramp_ * ramp_) * smoother_d2((end - t) / ramp_);
}

double BumpProfile::integral(double t) const {
  const double end = support_end();
  if (t <= 0.0) return 0.0;
  if (t < ramp_) return delta_ * ramp_ * smoother_antiderivative(t / ramp_);
  if (t <= ramp_ + plateau_) return delta_ * ramp_ * 0.5 + delta_ * (t - ramp_);
  if (t < end) return delta_ * ramp_ * 0.5 + delta_ * plateau_ + delta_ * ramp_ * (0.5 - smoother_antiderivative((end - t) / ramp_));
  return R_;
}

BumpProfile::Check BumpProfile::verify(double step) const {
  Check c{};
  c.support_end = support_end();
  auto grid = RadialGrid::over(0.0, c.support_end + 1.0, step);
  std::vector<double> f(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double t = grid.r(i);
    f[i] = value(t);
    c.sup_f = std::max(c.sup_f, std::abs(f[i]));
    c.sup_df = std::max(c.sup_df, std::abs(d1(t)));
    c.sup_ddf = std::max(c.sup_ddf, std::abs(d2(t)));
  }
  c.quadrature = simpson(f, step);
  c.quadrature_rel_error = std::abs(c.quadrature - R_) / R_;
  const double tol = 1e-12;
  c.ok = c.support_end <= R_ / delta_ + 4.0 + tol && c.sup_f <= delta_ * (1 + tol) && c.sup_df <= delta_ * (1 + tol) &&
         c.sup_ddf <= 1.0 + tol && c.quadrature_rel_error <= 1e-6;
  return c;
}

namespace {
TubeGeometry tube_geometry(double core_length, double R) {
  TubeGeometry g;
  g.core_length = core_length;
  g.radius = R;
  g.meridian_length = 2.0 * std::numbers::pi * std::sinh(R);
  g.boundary_area = 2.0 * std::numbers::pi * core_length * std::sinh(R) * std::cosh(R);
  g.longitude_length = core_length * std::cosh(R);
  g.boundary = {{g.meridian_length, 0.0}, {0.0, g.longitude_length}};
  return g;
}
}  // namespace

ModelMetric hyperbolic_tube(double core_length, double R, double step, double r_min) {
  if (!(core_length > 0.0) || !(R > 0.0)) throw DomainError("hyperbolic_tube: parameters must be positive");
  if (R <= r_min) throw DomainError("hyperbolic_tube: radius must exceed r_min");
  ModelMetric out;
  out.metric = WarpedMetric::sample(RadialGrid::over(r_min, R, step), MetricKind::tube, [](double r) {
    double s = std::sinh(r), c = std::cosh(r);
    return WarpValues{s, c, s, c, s, c};
  });
  out.tube = tube_geometry(core_length, R);
  return out;
}

WarpedMetric hyperbolic_cusp(double r_min, double r_max, double step) {
  return WarpedMetric::sample(RadialGrid::over(r_min, r_max, step), MetricKind::cusp, [](double r) {
    double e = std::exp(-r);
    return WarpValues{e, -e, e, e, -e, e};
  });
}

WarpedMetric expanding_cusp(double r_min, double r_max, double step) {
  return WarpedMetric::sample(RadialGrid::over(r_min, r_max, step), MetricKind::cusp, [](double r) {
    double e = 0.5 * std::exp(r);
    return WarpValues{e, e, e, e, e, e};
  });
}

WarpedMetric flat_product(double r_min, double r_max, double step) {
  return WarpedMetric::sample(RadialGrid::over(r_min, r_max, step), MetricKind::generic,
                              [](double) { return WarpValues{1, 0, 0, 1, 0, 0}; });
}

FuterBound futer_radius_bound(double core_length, double eps) {
  if (!(eps > 0.0) || eps > 0.3) throw DomainError("futer bound: need 0 < eps <= 0.3");
  if (!(core_length > 0.0)) throw DomainError("futer bound: core length must be positive");
  if (core_length >= 8.0 * eps * eps) throw HypothesisError("futer bound: need core length < 8 eps^2");
  FuterBound b;
  b.argument = eps / std::sqrt(8.0 * core_length);
  if (b.argument < 1.0) {
    b.vacuous = true;
    b.radius = 0.0;
  } else {
    b.radius = std::acosh(b.argument);
  }
  return b;
}

WarpedMetric drilling_interpolation(double Rhat, const CutoffProfile& sigma, double r_min, double r_max, double step) {
  if (Rhat < 3.0) throw DomainError("drilling interpolation requires Rhat >= 3");
  return WarpedMetric::sample(RadialGrid::over(r_min, r_max, step), MetricKind::interpolated, [&](double r) {
    double t = r - Rhat;
    double s = sigma.value(t), s1 = sigma.d1(t), s2 = sigma.d2(t);
    double em = 0.5 * std::exp(-r);
    // e^r/2 - sinh r = e^{-r}/2 and e^r/2 - cosh r = -e^{-r}/2
    double q = s * em, q1 = (s1 - s) * em, q2 = (s2 - 2 * s1 + s) * em;
    double sh = std::sinh(r), ch = std::cosh(r);
    return WarpValues{sh + q, ch + q1, sh + q2, ch - q, sh - q1, ch - q2};
  });
}

WarpedMetric filling_interpolation(double R, const CutoffProfile& sigma, double r_min, double r_max, double step) {
  if (R < 3.0) throw DomainError("filling interpolation requires R >= 3");
  return WarpedMetric::sample(RadialGrid::over(r_min, r_max, step), MetricKind::interpolated, [&](double r) {
    double t = r - R;
    double s = sigma.value(t), s1 = sigma.d1(t), s2 = sigma.d2(t);
    double ep = 0.5 * std::exp(r), em = 0.5 * std::exp(-r);
    double q = s * em, q1 = (s1 - s) * em, q2 = (s2 - 2 * s1 + s) * em;
    return WarpValues{ep - q, ep - q1, ep - q2, ep + q, ep + q1, ep + q2};
  });
}

Counterexample counterexample_metric(const CounterexampleParams& p) {
  if (!(p.m > 0.0) || p.tube_radius < 0.0) throw DomainError("counterexample: m and tube radius must be positive");
  if (!(p.boundary.covolume() > 0.0)) throw DomainError("counterexample: degenerate boundary torus");
  BumpProfile bump(p.delta, p.R);
  double rad = p.tube_radius > 0.0 ? p.tube_radius : p.m + bump.support_end() + 3.0;
  if (rad - p.m - bump.support_end() < 0.5) throw DomainError("counterexample: tube too thin for the bump support");
  if (rad > 300.0) throw DomainError("counterexample: tube radius above 300 overflows the warping functions");
  WarpedMetric metric = WarpedMetric::sample(RadialGrid::over(0.1, rad, p.step), MetricKind::deformed, [&](double r) {
    double t = rad - r - p.m;
    double s = bump.integral(t), s1 = -bump.value(t), s2 = bump.d1(t);
    double sh = std::sinh(r), ch = std::cosh(r), e = std::exp(s);
    return WarpValues{sh, ch, sh, ch * e, e * (sh + ch * s1), e * (ch + 2 * sh * s1 + ch * (s2 + s1 * s1))};
  });
  double core_length = p.boundary.covolume() / (2.0 * std::numbers::pi * std::sinh(rad) * std::cosh(rad));
  Counterexample out{metric, tube_geometry(core_length, rad), bump, 1.0, p.delta > p.delta_max};
  out.tube.boundary = p.boundary;
  out.stretch_factor = metric.b.front() / std::cosh(metric.grid.r_min);
  return out;
}

// largest measured ratio 8.51 (lambda = 0.1, delta = 0.005, m = 0.5) over admissible eps <= lambda / 8
double ricci_deficit_constant() { return 10.0; }

RicciDeficit weighted_ricci_deficit(const WarpedMetric& metric, const TubeGeometry& tube, double lambda, double m) {
  if (!(lambda > 0.0 && lambda < 2.0)) throw DomainError("weighted deficit: lambda must lie in (0,2)");
  if (!(tube.radius > 0.0) || !(tube.core_length > 0.0)) throw DomainError("weighted deficit: missing tube lattice data");
  RicciDeficit out;
  out.inj_boundary = tube.boundary.injectivity_radius();
  out.D0 = tube.boundary.diameter();
  CurvatureData cd = curvature_of_warped(metric, -1.0);
  out.eps = cd.sup_sec_deviation(-1.0);
  const std::size_t n = metric.grid.n;
  std::vector<double> integrand(n);
  const double section = 2.0 * std::numbers::pi * tube.core_length;
  const double log_inj = std::log(out.inj_boundary);
  for (std::size_t i = 0; i < n; ++i) {
    double r = metric.grid.r(i);
    Vec3 d = cd.ricci[i].diagonal().array() + 2.0;
    // inj(r) = inj(dT) e^{-(Rad - r)}; combine exponents before exponentiating
    double log_w = -(2.0 - lambda) * (log_inj - (tube.radius - r)) + std::log(metric.a[i] * metric.b[i] * section);
    integrand[i] = d.squaredNorm() == 0.0 ? 0.0 : d.squaredNorm() * std::exp(log_w);
  }
  out.value = simpson(integrand, metric.grid.step);
  double upper = tube.radius - 1.0;
  double tail = upper > m ? 2.0 / lambda * (std::exp(-lambda * m / 2) - std::exp(-lambda * upper / 2)) : 0.0;
  double base = out.D0 * out.D0 * out.eps * out.eps * tail;
  out.ratio = base > 0.0 ? out.value / base : 0.0;
  out.bound = ricci_deficit_constant() * base;
  return out;
}

void check_growth_condition(const std::vector<double>& distances, double kappa_prime, double m) {
  std::vector<double> d = distances;
  std::sort(d.begin(), d.end());
  for (std::size_t i = 0; i < d.size(); ++i) {
    // count of entries <= d[i], ties included
    std::size_t j = i;
    while (j + 1 < d.size() && d[j + 1] == d[i]) ++j;
    double count = static_cast<double>(j + 1);
    if (count > m * std::exp(kappa_prime * d[i]) * (1 + 1e-12))
      throw HypothesisError("sparsity growth condition violated at r = " + std::to_string(d[i]));
    i = j;
  }
}

SparsityResult sparsity_sum(const std::vector<double>& distances, double delta, double kappa_prime, double m) {
  if (!(delta + kappa_prime < 2.0)) throw HypothesisError("sparsity sum: need delta + kappa' < 2");
  if (!(m > 0.0)) throw DomainError("sparsity sum: m must be positive");
  for (double d : distances)
    if (!(d >= 0.0)) throw DomainError("sparsity sum: distances must be non-negative");
  check_growth_condition(distances, kappa_prime, m);
  SparsityResult out;
  if (distances.empty()) return out;
  double r0 = std::numeric_limits<double>::infinity();
  for (double d : distances) {
    double k = std::ceil(d);
    r0 = std::min(r0, k);
    out.sum += std::exp(-(2.0 - delta) * k);
  }
  double beta = 2.0 - delta - kappa_prime;
  out.bound = m / beta * std::exp(-beta * (r0 - 1.0));
  return out;
}

}  // namespace pinchlab
