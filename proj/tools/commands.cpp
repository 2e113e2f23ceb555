#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pinchlab/acceptance.hpp"
#include "pinchlab/cusp_ode.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/solver.hpp"
#include "pinchlab/uniformization.hpp"

namespace pinchlab::cli {

namespace {

std::string single_target(const Options& o, const std::string& command) {
  if (o.targets.size() != 1) throw UsageError(command + ": expected exactly one target");
  return o.targets.front();
}

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

CutoffProfile cutoff_of(const std::string& name) {
  if (name == "flat") return CutoffProfile(CutoffProfile::Shape::flat);
  if (name == "smootherstep") return CutoffProfile(CutoffProfile::Shape::smootherstep);
  if (name == "smoothstep2") return CutoffProfile(CutoffProfile::Shape::smoothstep2);
  throw UsageError("unknown cutoff '" + name + "' (flat, smootherstep, smoothstep2)");
}

BoundaryPolicy policy_of(const std::string& name) {
  if (name == "match") return BoundaryPolicy::match_hyperbolic_ends;
  if (name == "decay") return BoundaryPolicy::decay_both_ends;
  throw UsageError("unknown policy '" + name + "' (match, decay)");
}

Check le(const std::string& name, double v, double t) { return {name, v, Relation::le, t}; }
Check ge(const std::string& name, double v, double t) { return {name, v, Relation::ge, t}; }

std::string metric_csv(const WarpedMetric& m, const CurvatureData& cd) {
  std::ostringstream s;
  s << "r,a,da,dda,b,db,ddb,sec_rtheta,sec_ry,sec_thetay\n";
  for (std::size_t i = 0; i < m.grid.n; ++i)
    s << csv_number(m.grid.r(i)) << ',' << csv_number(m.a[i]) << ',' << csv_number(m.da[i]) << ','
      << csv_number(m.dda[i]) << ',' << csv_number(m.b[i]) << ',' << csv_number(m.db[i]) << ','
      << csv_number(m.ddb[i]) << ',' << csv_number(cd.sec_rtheta[i]) << ',' << csv_number(cd.sec_ry[i]) << ','
      << csv_number(cd.sec_thetay[i]) << '\n';
  return s.str();
}

std::string tensor_csv(const SymRadialTensor& h) {
  std::ostringstream s;
  s << "r";
  for (const char* n : kCompName) s << ',' << n;
  s << '\n';
  for (std::size_t i = 0; i < h.grid.n; ++i) {
    s << csv_number(h.grid.r(i));
    for (int k = 0; k < 6; ++k) s << ',' << csv_number(h.c[k][i]);
    s << '\n';
  }
  return s.str();
}

Json tube_json(const TubeGeometry& t) {
  Json j;
  j["core_length"] = t.core_length;
  j["radius"] = t.radius;
  j["meridian_length"] = t.meridian_length;
  j["longitude_length"] = t.longitude_length;
  j["boundary_area"] = t.boundary_area;
  return j;
}

// Largest curvature deviation over nodes selected by keep(r).
template <class Keep>
double deviation_where(const WarpedMetric& m, const CurvatureData& cd, Keep keep) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.grid.n; ++i)
    if (keep(m.grid.r(i))) d = std::max(d, cd.dev_kappa[i]);
  return d;
}

Counterexample make_counterexample(const Options& o, double R) {
  CounterexampleParams p;
  p.delta = o.delta;
  p.R = R;
  p.m = o.m;
  p.step = o.step;
  return counterexample_metric(p);
}

void verify_counterexample(const Options& o, Json& config, Outcome& out) {
  const double R = o.R.value_or(1.0);
  const double tol = o.tol.value_or(1e-8);
  config["R"] = R;
  config["delta"] = o.delta;
  config["m"] = o.m;
  config["lambda"] = o.lambda;
  config["step"] = o.step;
  config["tol"] = tol;
  Counterexample c = make_counterexample(o, R);
  CurvatureData cd = curvature_of_warped(c.metric, -1.0);
  RicciDeficit rd = weighted_ricci_deficit(c.metric, c.tube, o.lambda, o.m);
  const double rad = c.tube.radius, end = o.m + c.bump.support_end();
  Json cl = claim("counterexample-obstruction", "deformed tube stays pinched and stretches the far circle by e^R");
  add_check(out, cl, le("stretch_relative_error", std::abs(c.stretch_factor / std::exp(R) - 1.0), 1e-12));
  add_check(out, cl, le("deviation_outside_deformation",
                        deviation_where(c.metric, cd, [&](double r) { return rad - r <= o.m || rad - r >= end; }), tol));
  add_check(out, cl, le("eps_over_lambda_bound", rd.eps / (o.lambda / 8.0), 1.0));
  add_check(out, cl, le("deficit_over_bound", rd.value / rd.bound, 1.0));
  out.summary["claims"].push_back(cl);
  Json r;
  r["eps"] = rd.eps;
  r["deficit"] = rd.value;
  r["deficit_bound"] = rd.bound;
  r["deficit_constant"] = ricci_deficit_constant();
  r["D0"] = rd.D0;
  r["inj_boundary"] = rd.inj_boundary;
  r["stretch_factor"] = c.stretch_factor;
  r["delta_warning"] = c.delta_warning;
  r["tube"] = tube_json(c.tube);
  out.summary["results"] = r;
  out.csv["metric"] = metric_csv(c.metric, cd);
}

WarpedMetric interpolation(const std::string& kind, double R, const CutoffProfile& sigma, double lo, double hi,
                           double step) {
  return kind == "drilling" ? drilling_interpolation(R, sigma, lo, hi, step)
                            : filling_interpolation(R, sigma, lo, hi, step);
}

Json banach_json(const BanachResult& res) {
  Json j;
  j["converged"] = res.converged;
  j["contraction_certified"] = res.contraction_certified;
  j["max_ratio"] = res.max_ratio;
  j["initial_residual"] = res.initial_residual;
  j["final_residual"] = res.final_residual;
  j["initial_sec_deviation"] = res.initial_sec_deviation;
  j["final_sec_deviation"] = res.sup_sec_deviation;
  j["c2_distance"] = res.c2_distance;
  j["phi_warning"] = res.phi_warning;
  Json trace = Json::array();
  for (const auto& s : res.trace) trace.push_back({{"k", s.k}, {"update", s.update}, {"ratio", s.ratio}, {"residual", s.residual}});
  j["trace"] = trace;
  return j;
}

std::string trace_csv(const BanachResult& res) {
  std::ostringstream s;
  s << "k,update,ratio,residual\n";
  for (const auto& t : res.trace)
    s << t.k << ',' << csv_number(t.update) << ',' << csv_number(t.ratio) << ',' << csv_number(t.residual) << '\n';
  return s.str();
}

std::vector<double> values_or(const Options& o, std::vector<double> def) { return o.values.empty() ? def : o.values; }

}  // namespace

Outcome run_verify(const Options& o, Json& config) {
  const std::string model = single_target(o, "verify");
  Outcome out;
  out.summary["claims"] = Json::array();
  config["model"] = model;
  if (model == "counterexample") {
    verify_counterexample(o, config, out);
    return out;
  }
  const double tol = o.tol.value_or(1e-8);
  WarpedMetric m;
  double kappa = -1.0;
  std::optional<TubeGeometry> tube;
  if (model == "tube") {
    double R = o.R.value_or(2.0);
    config["R"] = R;
    config["core_length"] = o.core_length;
    ModelMetric mm = hyperbolic_tube(o.core_length, R, o.step, o.r_min.value_or(0.1));
    m = mm.metric;
    tube = mm.tube;
  } else if (model == "cusp" || model == "expanding" || model == "flat") {
    double lo = o.r_min.value_or(0.0), hi = o.r_max.value_or(10.0);
    config["r_min"] = lo;
    config["r_max"] = hi;
    m = model == "cusp" ? hyperbolic_cusp(lo, hi, o.step)
        : model == "expanding" ? expanding_cusp(lo, hi, o.step)
                               : flat_product(lo, hi, o.step);
    if (model == "flat") kappa = 0.0;
  } else if (model == "drilling" || model == "filling") {
    double R = o.R.value_or(6.0);
    config["R"] = R;
    config["cutoff"] = o.cutoff;
    m = interpolation(model, R, cutoff_of(o.cutoff), R - 3.0, R + 3.0, o.step);
  } else {
    throw UsageError("verify: unknown model '" + model + "' (tube, cusp, expanding, flat, drilling, filling, counterexample)");
  }
  config["step"] = o.step;
  config["tol"] = tol;
  CurvatureData cd = curvature_of_warped(m, kappa);
  DerivativeConsistency dc = check_derivative_consistency(m);
  Json r;
  r["kappa"] = kappa;
  r["sup_sec_deviation"] = cd.sup_sec_deviation(kappa);
  r["derivative_consistency"] = {{"max_rel_d1", dc.max_rel_d1}, {"max_rel_d2", dc.max_rel_d2}, {"tolerance", dc.tolerance}};
  Json cl;
  if (model == "drilling" || model == "filling") {
    double R = o.R.value_or(6.0);
    cl = claim("interpolation-pinching", "hyperbolic outside the width-one transition zone");
    double outside = deviation_where(m, cd, [&](double r) { return r <= R - 1.0 || r >= R; });
    add_check(out, cl, le("deviation_outside_transition", outside, tol));
    r["e^{-2R}"] = std::exp(-2.0 * R);
  } else {
    cl = claim("constant-curvature-oracle", "model metric has constant curvature");
    add_check(out, cl, le("sup_sec_deviation", cd.sup_sec_deviation(kappa), tol));
  }
  add_check(out, cl, le("derivative_consistency_d1", dc.max_rel_d1, dc.tolerance));
  add_check(out, cl, le("derivative_consistency_d2", dc.max_rel_d2, dc.tolerance));
  out.summary["claims"].push_back(cl);
  if (tube) {
    r["tube"] = tube_json(*tube);
    r["margulis_mu_0.1"] = tube->margulis(0.1);
  }
  out.summary["results"] = r;
  out.csv["metric"] = metric_csv(m, cd);
  return out;
}

Outcome run_solve(const Options& o, Json& config) {
  const std::string target = single_target(o, "solve");
  Outcome out;
  out.summary["claims"] = Json::array();
  config["target"] = target;
  BanachConfig bc;
  bc.policy = policy_of(o.policy);
  bc.tol = o.tol.value_or(1e-9);
  bc.max_iter = o.max_iter;
  config["policy"] = to_string(bc.policy);
  config["tol"] = bc.tol;
  config["max_iter"] = bc.max_iter;
  config["step"] = o.step;
  if (target == "drilling" || target == "filling") {
    double R = o.R.value_or(6.0);
    config["R"] = R;
    config["cutoff"] = o.cutoff;
    WarpedMetric g = interpolation(target, R, cutoff_of(o.cutoff), R - 3.5, R + 3.0, o.step);
    Json cl = claim("fixed-point", "Banach iteration converges to a hyperbolic metric");
    try {
      BanachResult res = banach_iterate(g, bc);
      add_check(out, cl, ge("converged", res.converged ? 1.0 : 0.0, 1.0));
      add_check(out, cl, le("max_contraction_ratio", res.max_ratio, 0.5));
      add_check(out, cl, le("final_sec_deviation", res.sup_sec_deviation, 1e-6));
      out.summary["results"] = banach_json(res);
      out.csv["trace"] = trace_csv(res);
      out.csv["h"] = tensor_csv(res.h);
    } catch (const Error& e) {
      add_check(out, cl, ge("converged", 0.0, 1.0));
      out.summary["results"] = {{"error", e.what()}};
    }
    out.summary["claims"].push_back(cl);
    return out;
  }
  if (target == "counterexample") {
    double R = o.R.value_or(1.0);
    config["R"] = R;
    config["delta"] = o.delta;
    config["m"] = o.m;
    out.asserted = false;
    Counterexample c = make_counterexample(o, R);
    const double rad = c.tube.radius;
    WarpedMetric window = c.metric.restricted(c.metric.grid.nearest(rad - o.m - c.bump.support_end() - 1.0),
                                              c.metric.grid.nearest(rad - o.m + 1.0));
    try {
      BanachResult res = banach_iterate(window, bc);
      out.summary["results"] = banach_json(res);
      out.csv["trace"] = trace_csv(res);
    } catch (const Error& e) {
      out.summary["results"] = {{"converged", false}, {"error", e.what()}};
    }
    return out;
  }
  throw UsageError("solve: unknown target '" + target + "' (drilling, filling, counterexample)");
}

Outcome run_sweep(const Options& o, Json& config) {
  const std::string exp = single_target(o, "sweep");
  Outcome out;
  out.summary["claims"] = Json::array();
  config["experiment"] = exp;
  config["step"] = o.step;
  std::ostringstream csv;
  if (exp == "pinching") {
    auto Rs = values_or(o, {4, 5, 6, 7, 8});
    config["values"] = Rs;
    config["cutoff"] = o.cutoff;
    const CutoffProfile sigma = cutoff_of(o.cutoff);
    const double tol = o.tol.value_or(0.1);
    config["tol"] = tol;
    csv << "R,drilling,filling\n";
    std::vector<double> ld, lf;
    for (double R : Rs) {
      double d = curvature_of_warped(interpolation("drilling", R, sigma, R - 3.0, R + 3.0, o.step)).sup_sec_deviation(-1.0);
      double f = curvature_of_warped(interpolation("filling", R, sigma, R - 3.0, R + 3.0, o.step)).sup_sec_deviation(-1.0);
      ld.push_back(std::log(d));
      lf.push_back(std::log(f));
      csv << csv_number(R) << ',' << csv_number(d) << ',' << csv_number(f) << '\n';
    }
    Json cl = claim("interpolation-pinching-decay", "sup|sec+1| decays like e^{-2R}");
    double sd = fit_slope(Rs, ld), sf = fit_slope(Rs, lf);
    add_check(out, cl, le("drilling_slope_error", std::abs(sd + 2.0), tol));
    add_check(out, cl, le("filling_slope_error", std::abs(sf + 2.0), tol));
    out.summary["claims"].push_back(cl);
    out.summary["results"] = {{"drilling_slope", sd}, {"filling_slope", sf}};
  } else if (exp == "banach") {
    auto Rs = values_or(o, {4, 5, 6});
    config["values"] = Rs;
    csv << "R,c2_distance,initial_sec_deviation,final_sec_deviation,iterations\n";
    std::vector<double> logs;
    for (double R : Rs) {
      BanachResult res = banach_iterate(drilling_interpolation(R, cutoff_of(o.cutoff), R - 3.5, R + 3.0, o.step));
      logs.push_back(std::log(res.c2_distance));
      csv << csv_number(R) << ',' << csv_number(res.c2_distance) << ',' << csv_number(res.initial_sec_deviation) << ','
          << csv_number(res.sup_sec_deviation) << ',' << res.trace.size() << '\n';
    }
    Json cl = claim("fixed-point", "C2 distance to the fixed point decays in R");
    double s = fit_slope(Rs, logs);
    add_check(out, cl, le("c2_distance_slope", s, -1.8));
    out.summary["claims"].push_back(cl);
    out.summary["results"] = {{"c2_distance_slope", s}};
  } else if (exp == "uniformization") {
    auto amps = values_or(o, {0.1, 0.05, 0.01});
    config["values"] = amps;
    config["resolution"] = o.resolution;
    if (o.resolution < 8) throw UsageError("sweep uniformization: resolution must be at least 8");
    const auto n = static_cast<std::size_t>(o.resolution);
    const Lattice2D unit;
    csv << "amplitude,sup_rho,sup_K,ratio,residual,gauss_bonnet,iterations,diameter_upper\n";
    Json cl = claim("effective-uniformization", "sup|rho| / sup|K| bounded by one constant");
    double worst = 0.0, gb = 0.0;
    for (double a : amps) {
      if (!(a > 0.0) || a > UniformizationConfig{}.delta0) throw UsageError("sweep uniformization: amplitudes must lie in (0, 0.1]");
      TorusGrid rho = TorusGrid::from_function(unit, n, n, [a](const Eigen::Vector2d& x) {
        double p = 2.0 * std::numbers::pi;
        return a * (std::sin(p * x(0)) + 0.5 * std::cos(p * (x(0) + x(1))) + 0.3 * std::sin(2.0 * p * x(1)));
      });
      GaussCurvature gc = gauss_curvature(rho);
      RecoveredRho rec = recover_rho(gc.K);
      double ratio = rec.rho.sup() / gc.K.sup();
      double rmax = *std::max_element(rec.rho.values.begin(), rec.rho.values.end());
      worst = std::max(worst, ratio);
      gb = std::max(gb, std::abs(gc.gauss_bonnet));
      csv << csv_number(a) << ',' << csv_number(rec.rho.sup()) << ',' << csv_number(gc.K.sup()) << ','
          << csv_number(ratio) << ',' << csv_number(rec.residual) << ',' << csv_number(gc.gauss_bonnet) << ','
          << rec.iterations << ',' << csv_number(std::exp(0.5 * rmax) * unit.diameter()) << '\n';
    }
    add_check(out, cl, le("max_rho_over_K", worst, calibrated_uniformization_constant()));
    add_check(out, cl, le("max_gauss_bonnet", gb, 1e-8));
    out.summary["claims"].push_back(cl);
  } else if (exp == "counterexample") {
    auto deltas = values_or(o, {0.04, 0.02, 0.01});
    const double R = o.R.value_or(1.0);
    config["values"] = deltas;
    config["R"] = R;
    config["m"] = o.m;
    config["lambda"] = o.lambda;
    csv << "delta,eps,deficit,bound,stretch_factor,tube_radius\n";
    Json cl = claim("counterexample-obstruction", "pinching and weighted deficit under the calibrated constants");
    double worst = 0.0, hyp = 0.0;
    for (double d : deltas) {
      Options od = o;
      od.delta = d;
      Counterexample c = make_counterexample(od, R);
      RicciDeficit rd = weighted_ricci_deficit(c.metric, c.tube, o.lambda, o.m);
      worst = std::max(worst, rd.value / rd.bound);
      hyp = std::max(hyp, rd.eps / (o.lambda / 8.0));
      csv << csv_number(d) << ',' << csv_number(rd.eps) << ',' << csv_number(rd.value) << ',' << csv_number(rd.bound)
          << ',' << csv_number(c.stretch_factor) << ',' << csv_number(c.tube.radius) << '\n';
    }
    add_check(out, cl, le("max_deficit_over_bound", worst, 1.0));
    add_check(out, cl, le("max_eps_over_lambda_bound", hyp, 1.0));
    out.summary["claims"].push_back(cl);
  } else if (exp == "exponents") {
    CriterionReport rep = run_criterion(3, AcceptanceConfig{o.seed, 1.0});
    Json cl = claim(rep.key, rep.title);
    for (const Check& c : rep.checks) add_check(out, cl, c);
    out.summary["claims"].push_back(cl);
    csv << "name,value\n";
    for (const auto& [name, v] : rep.logged) csv << name << ',' << csv_number(v) << '\n';
  } else {
    throw UsageError("sweep: unknown experiment '" + exp + "' (pinching, banach, uniformization, counterexample, exponents)");
  }
  out.csv["sweep"] = csv.str();
  return out;
}

Outcome run_accept(const Options& o, Json& config) {
  std::vector<int> ids;
  for (const std::string& t : o.targets) {
    if (t == "all") {
      ids.clear();
      for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
      break;
    }
    try {
      std::size_t used = 0;
      int id = std::stoi(t, &used);
      if (used != t.size() || id < 1 || id > kCriterionCount) throw std::invalid_argument(t);
      ids.push_back(id);
    } catch (const std::logic_error&) {
      throw UsageError("accept: criteria are 'all' or integers 1.." + std::to_string(kCriterionCount));
    }
  }
  if (ids.empty()) throw UsageError("accept: no criteria given");
  if (!(o.scale > 0.0 && o.scale <= 1.0)) throw UsageError("accept: --scale must lie in (0, 1]");
  config["criteria"] = ids;
  config["scale"] = o.scale;
  Outcome out;
  out.summary["claims"] = Json::array();
  std::ostringstream csv;
  csv << "criterion,key,check,value,relation,threshold,pass\n";
  for (const CriterionReport& rep : run_acceptance(AcceptanceConfig{o.seed, o.scale}, ids)) {
    Json cl = claim(rep.key, rep.title);
    cl["criterion"] = rep.id;
    for (const Check& c : rep.checks) {
      add_check(out, cl, c);
      csv << rep.id << ',' << rep.key << ',' << c.name << ',' << (c.timing ? std::string("timing") : csv_number(c.value))
          << ',' << (c.relation == Relation::le ? "<=" : ">=") << ',' << csv_number(c.threshold) << ','
          << (c.pass() ? "true" : "false") << '\n';
    }
    Json logged = Json::object();
    for (const auto& [name, v] : rep.logged) logged[name] = v;
    cl["logged"] = logged;
    cl["notes"] = rep.notes;
    cl["pass"] = rep.pass();
    out.summary["claims"].push_back(cl);
  }
  out.csv["checks"] = csv.str();
  return out;
}

}  // namespace pinchlab::cli
