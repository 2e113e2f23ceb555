#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pinchlab/geometry.hpp"
#include "pinchlab/grid.hpp"
#include "pinchlab/pointwise.hpp"

namespace pinchlab {

enum class MetricKind { tube, cusp, interpolated, deformed, generic };
std::string to_string(MetricKind k);

// a, a', a'', b, b', b'' at one radius.
struct WarpValues {
  double a = 1.0, da = 0.0, dda = 0.0;
  double b = 1.0, db = 0.0, ddb = 0.0;
};

// dr^2 + a(r)^2 dtheta^2 + b(r)^2 dy^2 sampled on a radial grid.
struct WarpedMetric {
  RadialGrid grid;
  MetricKind kind = MetricKind::generic;
  std::vector<double> a, da, dda, b, db, ddb;

  static WarpedMetric sample(const RadialGrid& grid, MetricKind kind,
                             const std::function<WarpValues(double)>& profile);

  WarpValues at(std::size_t i) const;
  MetricJet jet(std::size_t i) const;
  // (a, b, 1): coordinate component h_ij = w_i w_j H_ij of frame component H_ij.
  Vec3 frame_weights(std::size_t i) const;
  // Throws DomainError for non-positive warps and ResolutionError below 5 nodes.
  void validate() const;
  WarpedMetric restricted(std::size_t i0, std::size_t i1) const;
};

// Stored derivatives against finite differences of the stored values.
struct DerivativeConsistency {
  double max_rel_d1 = 0.0;
  double max_rel_d2 = 0.0;
  double tolerance = 0.0;  // 10 * step^2
  bool ok() const { return max_rel_d1 <= tolerance && max_rel_d2 <= tolerance; }
};
DerivativeConsistency check_derivative_consistency(const WarpedMetric& m);

// Frame components (h33, h13, h23, h11, h12, h22), frame (e1, e2, e3) = (a^-1 d_theta, b^-1 d_y, d_r).
enum Comp : int { k33 = 0, k13 = 1, k23 = 2, k11 = 3, k12 = 4, k22 = 5 };
inline constexpr std::array<std::array<int, 2>, 6> kCompIndex{{{2, 2}, {0, 2}, {1, 2}, {0, 0}, {0, 1}, {1, 1}}};
inline constexpr std::array<const char*, 6> kCompName{"h33", "h13", "h23", "h11", "h12", "h22"};

struct SymRadialTensor {
  RadialGrid grid;
  std::array<std::vector<double>, 6> c;

  static SymRadialTensor zeros(const RadialGrid& grid);
  static SymRadialTensor from_function(const RadialGrid& grid, const std::function<Mat3(double)>& frame);

  Mat3 at(std::size_t i) const;
  void set(std::size_t i, const Mat3& m);
  double norm_at(std::size_t i) const;
  double sup_norm() const;
  double trace_at(std::size_t i) const;

  SymRadialTensor& operator+=(const SymRadialTensor& o);
  SymRadialTensor& operator-=(const SymRadialTensor& o);
  SymRadialTensor& operator*=(double s);
};
SymRadialTensor operator+(SymRadialTensor a, const SymRadialTensor& b);
SymRadialTensor operator-(SymRadialTensor a, const SymRadialTensor& b);
SymRadialTensor operator*(double s, SymRadialTensor a);

// Pointwise frame norm |h|^2 = sum_ab H_ab^2.
double frame_norm(const Mat3& m);

struct CurvatureData {
  RadialGrid grid;
  double kappa = -1.0;
  std::vector<double> sec_rtheta, sec_ry, sec_thetay, scalar, dev_kappa;
  std::vector<Mat3> ricci;  // frame components

  double sup_sec_deviation(double k) const;
};

CurvatureData curvature_of_warped(const WarpedMetric& m, double kappa = -1.0);

// sup over the grid of |Rm - Rm^kappa|.
double curvature_deviation(const CurvatureData& d, double kappa);

struct DeviationSandwich {
  double sup_sec = 0.0;  // sup |sec - kappa|
  double dev = 0.0;      // sup |Rm - Rm^kappa|
  double c3 = 0.0;       // constant c(3)
  bool holds() const { return sup_sec <= dev * (1 + 1e-12) + 1e-15 && dev <= c3 * sup_sec * (1 + 1e-12) + 1e-15; }
};
DeviationSandwich curvature_deviation_sandwich(const CurvatureData& d, double kappa);

// A radial metric with arbitrary (symmetric, positive) coordinate components.
struct RadialMetric {
  RadialGrid grid;
  std::vector<Mat3> g;
  // Jets from the shared finite-difference stencils.
  std::vector<MetricJet> jets() const;
};
RadialMetric to_radial(const WarpedMetric& m);

// Curvature of a general radial metric from finite-difference jets.
struct GeneralCurvature {
  RadialGrid grid;
  std::vector<Vec3> operator_eigenvalues;  // curvature operator on Lambda^2
  std::vector<double> sec_deviation;       // sup over planes |sec - kappa|
  std::vector<double> dev_kappa;           // |Rm - Rm^kappa|
  double sup_over(std::size_t i0, std::size_t i1) const;
};
GeneralCurvature curvature_of_radial(const RadialMetric& m, double kappa = -1.0);
GeneralCurvature curvature_of_jets(const RadialGrid& grid, const std::vector<MetricJet>& jets, double kappa = -1.0);

// Coordinate samples of a frame tensor over a warped background.
std::vector<Mat3> to_coordinates(const SymRadialTensor& h, const WarpedMetric& bg);
SymRadialTensor to_frame(const std::vector<Mat3>& coord, const WarpedMetric& bg);
std::vector<TensorJet> radial_jets(const std::vector<Mat3>& coord, double step);
// Coordinate jets of a frame tensor: stencils act on the frame components,
// the background weights are differentiated analytically.
std::vector<TensorJet> frame_jets(const SymRadialTensor& h, const WarpedMetric& bg);

// beta_ref(g) in frame components (theta, y, r); for warped data only the dr entry survives.
std::vector<Vec3> bianchi(const WarpedMetric& ref, const WarpedMetric& g);
// beta_ref applied to a symmetric tensor given in frame components of ref.
std::vector<Vec3> bianchi(const WarpedMetric& ref, const SymRadialTensor& t);

// Phi_ref(g) in frame components of ref.
SymRadialTensor einstein_operator(const WarpedMetric& g, const WarpedMetric& ref);
// Jets of ref + h with ref differentiated analytically.
std::vector<MetricJet> perturbed_jets(const WarpedMetric& ref, const SymRadialTensor& h);
// Phi_ref(ref + h), h in frame components of ref, with finite-difference jets of h.
SymRadialTensor einstein_operator_perturbed(const WarpedMetric& ref, const SymRadialTensor& h);
// Ric(g) + 2g in frame components of g.
SymRadialTensor einstein_residual(const WarpedMetric& g);

// The linearization L h = 1/2 Delta_L h + 2h at the background, frame in and out.
SymRadialTensor linearized_einstein(const SymRadialTensor& h, const WarpedMetric& background);

}  // namespace pinchlab
