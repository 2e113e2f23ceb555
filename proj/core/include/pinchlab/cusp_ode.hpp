#pragma once

#include <array>
#include <string>
#include <vector>

#include "pinchlab/model_metrics.hpp"
#include "pinchlab/tensor_core.hpp"

namespace pinchlab {

// The linearized Einstein operator on the cusp dr^2 + e^{-2r}(dx1^2 + dx2^2)
// splits, in frame components H, into scalar blocks Q(d/dr) y = -2 F with
//   trace, h33:  Q = X^2 - 2X - 4
//   hi3:         Q = X^2 - 2X - 3
//   hij:         Q = X^2 - 2X      (plus the coupling -2 delta_ij (tr - H33))
enum class BlockTag { trace, h33, hi3, hij };
std::string to_string(BlockTag t);

struct OdeBlock {
  BlockTag tag = BlockTag::trace;
  // Q(X) = X^2 + b X + c
  double b = -2.0;
  double c = -4.0;
  // lambda1 > lambda2
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  static OdeBlock of(BlockTag tag);
  double q(double x) const { return x * x + b * x + c; }
};

// Constant trace-free frame tensor e^{-2r} u_ij dx^i dx^j on the cusp.
struct TrivialEinsteinVariation {
  double u11 = 0.0, u12 = 0.0, u22 = 0.0;

  double trace() const { return u11 + u22; }
  double norm() const;
  Mat3 frame() const;
  SymRadialTensor on(const RadialGrid& grid) const;
};

// Pointwise block residuals of L h = f on the cusp.
struct SystemResiduals {
  RadialGrid grid;
  std::array<std::vector<double>, 6> component;  // ordered as Comp
  std::vector<double> trace;
  // max |residual| over nodes [i0, i1]
  double max_over(std::size_t i0, std::size_t i1) const;
  double max_interior() const;  // skips the two nodes at each end
};
SystemResiduals assemble_system(const SymRadialTensor& h, const SymRadialTensor& f);

// L h on the exact cusp evaluated through the block system (frame in and out).
SymRadialTensor cusp_operator(const SymRadialTensor& h);

// Scalar combinations that decouple the system: H33, H13, H23, H12,
// D = H11 - H22 (hij block) and S = H11 + H22 (roots of the trace block).
struct DecoupledMode {
  std::string name;
  OdeBlock block;
  std::vector<double> y;
};
std::array<DecoupledMode, 6> decouple(const SymRadialTensor& h);

// Solution of Q(d/dr) y = forcing on the grid with y(r_min) = y0, y'(r_min) = dy0.
std::vector<double> solve_block(const OdeBlock& block, const RadialGrid& grid, const std::vector<double>& forcing,
                                double y0, double dy0);
// Same ODE with y(r_min) = y_start and y(r_max) = y_end.
std::vector<double> solve_block_bvp(const OdeBlock& block, const RadialGrid& grid,
                                    const std::vector<double>& forcing, double y_start, double y_end);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_lo = 0.0, r_hi = 0.0;  // sub-window actually fitted
  bool split = false;             // sign change forced a split at a zero
};
enum class Tail { right, left };
// Least-squares slope of log|y| over [r_lo, r_hi]; on sign changes the
// segment after the last zero is used for a right tail and the segment
// before the first zero for a left tail.
GrowthFit fit_growth_exponent(const RadialGrid& grid, const std::vector<double>& y, double r_lo, double r_hi,
                              Tail tail = Tail::right);

// Symmetric tensor field on (x1, x2, r): frame components over the cusp,
// periodic in x = s1 v1 + s2 v2 with s on an n1 x n2 grid of [0,1)^2.
struct Torus3DGrid {
  Lattice2D lattice;
  std::size_t n1 = 8, n2 = 8;
  RadialGrid grid;
  std::array<std::vector<double>, 6> c;

  static Torus3DGrid zeros(const Lattice2D& lattice, std::size_t n1, std::size_t n2, const RadialGrid& grid);
  // frame(x, r) gives frame components at the point with Euclidean cross-section coordinate x.
  static Torus3DGrid from_function(const Lattice2D& lattice, std::size_t n1, std::size_t n2, const RadialGrid& grid,
                                   const std::function<Mat3(const Eigen::Vector2d&, double)>& frame);
  std::size_t index(std::size_t i1, std::size_t i2, std::size_t ir) const { return (ir * n2 + i2) * n1 + i1; }
  Eigen::Vector2d point(std::size_t i1, std::size_t i2) const;
  Mat3 at(std::size_t i1, std::size_t i2, std::size_t ir) const;
  void set(std::size_t i1, std::size_t i2, std::size_t ir, const Mat3& m);
};

// Cross-sectional mean at each r.
SymRadialTensor average(const Torus3DGrid& field);

// L on the cusp for x-dependent fields: spectral derivatives across the
// torus, the shared radial stencils in r.
Torus3DGrid linearized_einstein_3d(const Torus3DGrid& field);

struct AveragingReport {
  std::vector<double> deviation;  // max over the slice of |h - avg h|
  std::vector<double> c1_norm;    // max over the slice of |h| + |D h|
  double constant = 0.0;          // max deviation / (D e^{-r} c1_norm)
  double diameter = 0.0;          // flat diameter of the cross-section
};
AveragingReport averaging_report(const Torus3DGrid& field);

enum class Classification { trivial_variation, zero, rejected };
std::string to_string(Classification c);

struct ClassifyConfig {
  double tolerance = 1e-4;      // classification remainder
  double fit_residual = 1e-6;   // relative misfit that marks h as not a solution
};

struct ClassificationResult {
  Classification kind = Classification::rejected;
  TrivialEinsteinVariation u;
  double remainder = 0.0;        // sup |h - u| over the window
  double violating = 0.0;        // largest sup of a mode with nonzero exponent
  double fit_residual = 0.0;     // relative misfit of the twelve-mode fit
  std::vector<std::pair<std::string, double>> mode_size;  // sup over the window of each fitted mode
};
// h on a two-sided window of the cusp, expected to solve L h = 0.
ClassificationResult classify_bounded_solution(const SymRadialTensor& h, double lambda, const ClassifyConfig& cfg = {});

// Orthogonal projection of the hij block at c_r onto trace-free constants.
TrivialEinsteinVariation canonical_variation(const SymRadialTensor& h, double c_r);

struct ExponentialTerm {
  double beta = 0.0;
  double mu = 0.0;
};

struct GrowthBoundReport {
  std::vector<double> bound;  // e^{l2 r}(|y0| + W(0) + |psi|_1) + e^{l1 (r - R)} + W(r) + |psi|_1 e^{-a r}
  std::vector<double> ratio;  // |y| / bound
  double max_ratio = 0.0;
  double psi_l1 = 0.0;
};
// y on [0, R-1] with Q(d/dr) y = O(W + psi e^{-a r}); checks the hypotheses
// (|y| <= 1, lambda2 <= 0 < lambda1, mu_k not a root, W = O(1) on [R-2, R-1]).
GrowthBoundReport growth_bound_check(const RadialGrid& grid, const std::vector<double>& y, const OdeBlock& block,
                                     const std::vector<ExponentialTerm>& W, const std::vector<double>& psi, double a,
                                     double R);

}  // namespace pinchlab
