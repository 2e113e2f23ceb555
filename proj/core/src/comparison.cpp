#include "pinchlab/comparison.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace odeint = boost::numeric::odeint;

double gronwall_bound(double sigma, double chi0, const std::vector<GronwallTerm>& terms, double t) {
  double out = std::abs(chi0) * std::exp(sigma * t);
  for (const auto& term : terms) {
    if (!(term.lambda > sigma)) throw HypothesisError("gronwall_bound: every lambda_i must exceed sigma");
    if (term.kappa < 0.0) throw HypothesisError("gronwall_bound: kappa_i must be non-negative");
    out += term.kappa * std::exp(term.lambda * t) / (term.lambda - sigma);
  }
  return out;
}

double operator_norm(const Eigen::MatrixXd& M, double tol) {
  if (M.size() == 0) return 0.0;
  const Eigen::MatrixXd G = M.transpose() * M;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(G.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 0.1 * static_cast<double>(i + 1) / static_cast<double>(v.size());
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = G * v;
    double nw = w.norm();
    if (nw == 0.0) {
      // v is in the kernel; restart along a coordinate direction with the largest column
      Eigen::Index j;
      G.colwise().norm().maxCoeff(&j);
      if (G.col(j).norm() == 0.0) return 0.0;
      v = Eigen::VectorXd::Unit(G.cols(), j);
      continue;
    }
    double next = v.dot(w);
    v = w / nw;
    if (std::abs(next - est) <= tol * std::max(next, 1e-300)) {
      est = next;
      break;
    }
    est = next;
  }
  return std::sqrt(std::max(est, 0.0));
}

double LinearSystem::envelope(int samples) const {
  double a = 0.0;
  for (double t : uniform_times(T, samples)) a = std::max(a, operator_norm(A(t)));
  return a;
}

std::vector<double> uniform_times(double T, int samples) {
  if (samples < 2) throw DomainError("uniform_times: need at least 2 samples");
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(samples - 1);
  return t;
}

Trajectory integrate(const LinearSystem& sys, const std::vector<double>& times, const IntegratorTolerance& tol) {
  using State = std::vector<double>;
  const int n = sys.dim();
  if (n == 0) throw DomainError("integrate: empty initial state");
  State x(sys.y0.data(), sys.y0.data() + n);
  auto rhs = [&](const State& s, State& ds, double t) {
    Eigen::Map<const Eigen::VectorXd> y(s.data(), n);
    Eigen::VectorXd d = sys.A(t) * y;
    if (sys.b) d += sys.b(t);
    ds.assign(d.data(), d.data() + n);
  };
  Trajectory out;
  auto observer = [&](const State& s, double t) {
    out.t.push_back(t);
    out.y.push_back(Eigen::Map<const Eigen::VectorXd>(s.data(), n));
  };
  auto stepper = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<State>());
  double dt0 = times.size() > 1 ? (times[1] - times[0]) * 1e-2 : 1e-3;
  odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observer);
  return out;
}

ComparisonResult compare_solutions(const LinearSystem& sys, const LinearSystem& sys_bar, const StabilityHypotheses& hyp,
                                   int samples, const IntegratorTolerance& tol) {
  if (sys.dim() != sys_bar.dim()) throw DomainError("compare_solutions: system dimensions differ");
  if (std::abs(sys.T - sys_bar.T) > 1e-12) throw DomainError("compare_solutions: horizons differ");
  const double T = sys.T;
  ComparisonResult res;
  res.t = uniform_times(T, samples);
  res.a = sys.envelope(samples);
  res.a_bar = sys_bar.envelope(samples);
  const double a = res.a, ab = res.a_bar;
  double g1 = hyp.eta - (a - ab);
  double g2 = hyp.mu_bar - std::max(a, ab);
  double g3 = hyp.mu - a;
  if (!(g1 > 0.0)) throw HypothesisError("compare_solutions: eta must exceed a - a_bar");
  const int n = sys.dim();
  // measured O-constants of the envelope conditions
  for (double t : res.t) {
    double dA = operator_norm(sys.A(t) - sys_bar.A(t));
    Eigen::VectorXd bb = sys_bar.b ? sys_bar.b(t) : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b = sys.b ? sys.b(t) : Eigen::VectorXd::Zero(n);
    auto ratio = [](double num, double den) {
      if (num <= 1e-300) return 0.0;
      return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
    };
    res.c_A = std::max(res.c_A, ratio(dA, hyp.eps * std::exp(hyp.eta * (t - T))));
    res.c_bbar = std::max(res.c_bbar, ratio(bb.norm(), hyp.beta_bar * std::exp(hyp.mu_bar * t)));
    res.c_b = std::max(res.c_b, ratio((b - bb).norm(), hyp.beta * std::exp(hyp.mu * t)));
  }
  if (!std::isfinite(res.c_A) || !std::isfinite(res.c_bbar) || !std::isfinite(res.c_b))
    throw HypothesisError("compare_solutions: an envelope with zero amplitude does not cover a nonzero difference");
  if (res.c_bbar > 0.0 && !(g2 > 0.0)) throw HypothesisError("compare_solutions: mu_bar must exceed max(a, a_bar)");
  if (res.c_b > 0.0 && !(g3 > 0.0)) throw HypothesisError("compare_solutions: mu must exceed a");
  res.min_gap = g1;
  if (res.c_bbar > 0.0) res.min_gap = std::min(res.min_gap, g2);
  if (res.c_b > 0.0) res.min_gap = std::min(res.min_gap, g3);
  res.near_violation = res.min_gap < 0.05;

  res.implied_constant = std::max(1.0, res.c_A / (ab + hyp.eta - a));
  if (res.c_bbar > 0.0)
    res.implied_constant = std::max(res.implied_constant, res.c_A * res.c_bbar / (g2 * (hyp.mu_bar + hyp.eta - a)));
  if (res.c_b > 0.0) res.implied_constant = std::max(res.implied_constant, res.c_b / g3);

  // Integrate (y_bar, d = y_bar - y) jointly so small differences keep their relative accuracy:
  // d' = A d + (A_bar - A) y_bar + (b_bar - b).
  LinearSystem joint;
  joint.T = T;
  joint.y0.resize(2 * n);
  joint.y0 << sys_bar.y0, sys_bar.y0 - sys.y0;
  joint.A = [&](double t) {
    Eigen::MatrixXd Ab = sys_bar.A(t), A = sys.A(t);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = Ab;
    M.bottomLeftCorner(n, n) = Ab - A;
    M.bottomRightCorner(n, n) = A;
    return M;
  };
  if (sys.b || sys_bar.b) {
    joint.b = [&](double t) {
      Eigen::VectorXd bb = sys_bar.b ? sys_bar.b(t) : Eigen::VectorXd::Zero(n);
      Eigen::VectorXd b = sys.b ? sys.b(t) : Eigen::VectorXd::Zero(n);
      Eigen::VectorXd out(2 * n);
      out << bb, bb - b;
      return out;
    };
  }
  Trajectory tr = integrate(joint, res.t, tol);
  const double d0 = (sys_bar.y0 - sys.y0).norm(), yb0 = sys_bar.y0.norm();
  res.diff.resize(res.t.size());
  res.bound.resize(res.t.size());
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    double t = res.t[i];
    double decay = std::exp(hyp.eta * (t - T));
    res.diff[i] = tr.y[i].tail(n).norm();
    res.bound[i] = d0 * std::exp(a * t) + hyp.eps * yb0 * std::exp(ab * t) * decay +
                   hyp.eps * hyp.beta_bar * std::exp(hyp.mu_bar * t) * decay + hyp.beta * std::exp(hyp.mu * t);
    if (res.diff[i] > 0.0) {
      double r = res.bound[i] > 0.0 ? res.diff[i] / res.bound[i] : std::numeric_limits<double>::infinity();
      res.max_ratio = std::max(res.max_ratio, r);
    }
  }
  return res;
}

LinearSystem jacobi_system(const std::function<Eigen::MatrixXd(double)>& R, const Eigen::VectorXd& J0,
                           const Eigen::VectorXd& dJ0, double T) {
  if (J0.size() != dJ0.size()) throw DomainError("jacobi_system: J(0) and J'(0) differ in dimension");
  const Eigen::Index n = J0.size();
  LinearSystem sys;
  sys.T = T;
  sys.y0.resize(2 * n);
  sys.y0 << J0, dJ0;
  sys.A = [R, n](double t) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    M.topRightCorner(n, n).setIdentity();
    M.bottomLeftCorner(n, n) = -R(t);
    return M;
  };
  return sys;
}

JacobiField jacobi_solve(const std::function<Eigen::MatrixXd(double)>& R, const Eigen::VectorXd& J0,
                         const Eigen::VectorXd& dJ0, double T, int samples, const IntegratorTolerance& tol) {
  LinearSystem sys = jacobi_system(R, J0, dJ0, T);
  Trajectory tr = integrate(sys, uniform_times(T, samples), tol);
  const Eigen::Index n = J0.size();
  JacobiField out;
  out.t = tr.t;
  for (const auto& y : tr.y) {
    out.J.push_back(y.head(n));
    out.dJ.push_back(y.tail(n));
  }
  return out;
}

}  // namespace pinchlab
