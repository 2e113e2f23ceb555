#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace pinchlab {

struct GronwallTerm {
  double kappa = 0.0;   // >= 0
  double lambda = 0.0;  // > sigma
};

// |chi(0)| e^{sigma t} + sum_i (lambda_i - sigma)^{-1} kappa_i e^{lambda_i t}
double gronwall_bound(double sigma, double chi0, const std::vector<GronwallTerm>& terms, double t);

// Largest singular value by power iteration on M^T M.
double operator_norm(const Eigen::MatrixXd& M, double tol = 1e-10);

// y' = A(t) y + b(t) on [0, T].
struct LinearSystem {
  std::function<Eigen::MatrixXd(double)> A;
  std::function<Eigen::VectorXd(double)> b;  // empty: b = 0
  Eigen::VectorXd y0;
  double T = 1.0;

  int dim() const { return static_cast<int>(y0.size()); }
  // max of ||A(t)||_op over `samples` equally spaced times
  double envelope(int samples = 401) const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
};

struct IntegratorTolerance {
  double abs = 1e-12;
  double rel = 1e-12;
};

// Adaptive Dormand-Prince 5(4) integration, reported at the given times.
Trajectory integrate(const LinearSystem& sys, const std::vector<double>& times, const IntegratorTolerance& tol = {});

std::vector<double> uniform_times(double T, int samples);

// Constants of the comparison hypotheses; each envelope holds up to the
// measured factor c_* (the O-constant of the corresponding condition).
struct StabilityHypotheses {
  double eps = 0.0;
  double eta = 0.0;
  double beta_bar = 0.0, mu_bar = 0.0;  // |b_bar| = O(beta_bar e^{mu_bar t})
  double beta = 0.0, mu = 0.0;          // |b - b_bar| = O(beta e^{mu t})
};

struct ComparisonResult {
  std::vector<double> t, diff, bound;
  double a = 0.0, a_bar = 0.0;
  // measured O-constants of conditions ii), iii), iv)
  double c_A = 0.0, c_bbar = 0.0, c_b = 0.0;
  // diff <= C bound follows with C = max(1, c_A/(a_bar+eta-a), c_A c_bbar/((mu_bar-a_bar)(mu_bar+eta-a)), c_b/(mu-a))
  double implied_constant = 1.0;
  double max_ratio = 0.0;
  double min_gap = 0.0;  // smallest of eta-(a-a_bar), mu_bar-max(a,a_bar), mu-a
  bool near_violation = false;
};

// Integrates both systems and compares |y_bar - y| with
// |y_bar0 - y0| e^{at} + eps |y_bar0| e^{a_bar t} e^{eta(t-T)} + eps beta_bar e^{mu_bar t} e^{eta(t-T)} + beta e^{mu t}.
ComparisonResult compare_solutions(const LinearSystem& sys, const LinearSystem& sys_bar, const StabilityHypotheses& hyp,
                                   int samples = 401, const IntegratorTolerance& tol = {});

struct JacobiField {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> J, dJ;
};

// J'' + R(t) J = 0 integrated as the first-order system (J, J').
JacobiField jacobi_solve(const std::function<Eigen::MatrixXd(double)>& R, const Eigen::VectorXd& J0,
                         const Eigen::VectorXd& dJ0, double T, int samples = 501, const IntegratorTolerance& tol = {});

// First-order form of J'' + R J = 0; its operator-norm envelope is max(1, ||R||).
LinearSystem jacobi_system(const std::function<Eigen::MatrixXd(double)>& R, const Eigen::VectorXd& J0,
                           const Eigen::VectorXd& dJ0, double T);

}  // namespace pinchlab
