#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <string>
#include <vector>

#include "pinchlab/cusp_ode.hpp"
#include "pinchlab/model_metrics.hpp"
#include "pinchlab/tensor_core.hpp"

namespace pinchlab {

// Where the radial window meets the small part. Depth is the distance to the
// complement of the small part: r - boundary_r in a cusp (r increasing into
// the cusp), boundary_r - r in a tube (r measured from the core, radius R = boundary_r).
struct SmallPartWindow {
  enum class Kind { none, cusp, tube };
  Kind kind = Kind::none;
  double boundary_r = 0.0;

  double depth(double r) const;
  // Inverse weight W_lambda.
  double weight(double r, double lambda) const;
  // Cutoff multiplying the trivial Einstein variation.
  double cutoff(double r) const;
  // Radius of the projection point on the window [r_lo, r_hi].
  double projection_radius(double r_lo, double r_hi) const;
};

struct NormConfig {
  int n = 3;
  double delta = 0.5;        // in (0, 2 sqrt(n-2))
  double r0 = 1.0;           // >= 1
  double eps_bar = 1.0;      // > 0
  double lambda = 0.5;       // in (0, 1)
  double b = 2.0;            // > 1
  double eta = 2.5;          // >= 2 + lambda
  double alpha = 0.5;        // exponent of the two-scale difference quotient
  double section_area = 1.0; // area of the flat cross-section at a = b = 1
  std::size_t basepoint_stride = 1;
  SmallPartWindow window;

  void validate() const;
  double weight_exponent() const { return 2.0 * std::sqrt(static_cast<double>(n - 2)) - delta; }
};

// Pointwise frame norms of h and its covariant derivatives.
struct PointwiseNorms {
  std::vector<double> h, grad, hess, lap;
  std::vector<Eigen::VectorXd> hess_frame;  // 81 frame components of the Hessian
};
PointwiseNorms pointwise_norms(const SymRadialTensor& h, const WarpedMetric& metric);

struct WeightedSample {
  double r = 0.0;
  bool in_E = false;
  double annulus = 0.0;  // int over B(x,2r0) \ B(x,r0) of e^{-w r_x} dvol
  double l2_c0 = 0.0;    // int e^{-w r_x} |h|^2 dvol
  double l2_c2 = 0.0;    // int e^{-w r_x} (|h|^2 + |Dh|^2 + |Delta h|^2) dvol
};

struct NormReport {
  double sup_c0 = 0.0, sup_c1 = 0.0, sup_c2 = 0.0;
  double holder_c0 = 0.0, holder_c2 = 0.0;  // two-scale difference quotients
  std::vector<WeightedSample> weighted;
  double weighted_c0 = 0.0, weighted_c2 = 0.0;  // sup over x outside E of the square roots
  double hybrid_0 = 0.0, hybrid_2 = 0.0;
  // exponential C^0_lambda norm; flagged when its supremum sits at the deep end of a cusp window
  double exp_c0 = 0.0;
  bool exp_c0_unbounded = false;
  double decomposition = 0.0;  // ||h - rho u||_{C^0_lambda} + |u|
  double decomposition_remainder = 0.0;
  TrivialEinsteinVariation u;
  double c_r = 0.0;
};

// Sup norms, Hoelder quotients, weighted integrals over every basepoint, the set E and both hybrid norms.
NormReport hybrid_norms(const SymRadialTensor& h, const WarpedMetric& metric, const NormConfig& cfg);
// Exponential and decomposition norms only.
NormReport decomposition_norm(const SymRadialTensor& h, const WarpedMetric& metric, const NormConfig& cfg);
// ||h - rho u||_{C^0_lambda} + |u| for an explicitly supplied u.
double decomposition_value(const SymRadialTensor& h, const TrivialEinsteinVariation& u, const NormConfig& cfg);

enum class BoundaryPolicy { decay_both_ends, match_hyperbolic_ends };
std::string to_string(BoundaryPolicy p);

// Frame data at both ends making metric + h the closest hyperbolic model
// (sinh/cosh tube, e^{-r} cusp or e^r/2 cusp).
std::pair<Mat3, Mat3> hyperbolic_end_data(const WarpedMetric& metric);

// The discretized L (frame components, node-major) with the same stencils as linearized_einstein.
Eigen::SparseMatrix<double> linearized_matrix(const WarpedMetric& metric);

// Factorized L with Dirichlet rows at both end nodes.
class LinearizedInverse {
 public:
  explicit LinearizedInverse(const WarpedMetric& metric);
  SymRadialTensor solve(const SymRadialTensor& f, const Mat3& left, const Mat3& right) const;
  const WarpedMetric& metric() const { return metric_; }

 private:
  WarpedMetric metric_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

struct Inversion {
  SymRadialTensor h;
  double residual = 0.0;  // sup over interior nodes of |L h - f|
  TrivialEinsteinVariation trivial;  // canonical variation at the window center
  bool resonant = false;             // trivial part dominates h
};
Inversion invert_linearized(const SymRadialTensor& f, const WarpedMetric& metric,
                            BoundaryPolicy policy = BoundaryPolicy::match_hyperbolic_ends);

// Empirical bound of ||h||_2 / ||f||_0 for decaying forcings on cusp windows.
double calibrated_inverse_constant();

struct BanachConfig {
  BoundaryPolicy policy = BoundaryPolicy::match_hyperbolic_ends;
  double tol = 1e-9;           // sup of Phi over interior nodes
  int max_iter = 40;
  double contraction = 0.5;    // certified ratio after the first step
  double divergence = 0.9;     // two consecutive ratios above this abort
  double phi_warning = 1e-2;   // initial residual considered too large
};

struct BanachStep {
  int k = 0;
  double update = 0.0;    // sup |h_k - h_{k-1}|
  double ratio = 0.0;     // update_k / update_{k-1}; 0 for the first step
  double residual = 0.0;  // sup |Phi(gbar + h_k)| over interior nodes
};

struct BanachResult {
  SymRadialTensor h;
  RadialMetric g0;
  std::vector<BanachStep> trace;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  bool contraction_certified = false;
  double max_ratio = 0.0;  // over steps after the first
  bool phi_warning = false;
  double sup_sec_deviation = 0.0;  // sup |sec(g0) + 1|, two nodes skipped at each end
  double initial_sec_deviation = 0.0;
  double c2_distance = 0.0;        // sup (|h| + |Dh| + |D^2 h|)
};
// h_{k+1} = h_k - L^{-1} Phi_gbar(gbar + h_k) from h_0 = 0 (plus end data under match-hyperbolic-ends).
BanachResult banach_iterate(const WarpedMetric& gbar, const BanachConfig& cfg = {});

struct IntegralReport {
  double h_sq = 0.0;       // ||h||^2
  double grad_sq = 0.0;    // ||Dh||^2
  double ric_pair = 0.0;   // (Ric(h), h)
  double first_margin = 0.0;  // ||Dh||^2 + (Ric(h), h)/2
  double rayleigh = 0.0;      // ||Dh||^2 / ||h||^2
  bool traceless = false;
  double eps = 0.0;           // sup |sec + 1| of the metric
  double poincare_bound = 0.0;  // n - c eps
  bool poincare_holds = true;   // checked only for traceless h
};
// c in the spectral gap n - c eps: c(3) (1 + sqrt 3).
double poincare_constant();
IntegralReport integral_inequality_checks(const SymRadialTensor& h, const WarpedMetric& metric,
                                          double section_area = 1.0);

}  // namespace pinchlab
