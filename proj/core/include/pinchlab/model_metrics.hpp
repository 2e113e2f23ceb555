#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pinchlab/tensor_core.hpp"

namespace pinchlab {

// Smooth sigma: R -> [0,1] with sigma = 1 on (-inf,-1] and 0 on [0,inf).
class CutoffProfile {
 public:
  // flat: C-infinity logistic step in k((1-u)^{-1/2} - u^{-1/2}), k = 2.5
  // smootherstep: 6u^5 - 15u^4 + 10u^3 (C^2)
  // smoothstep2: smoothstep composed with itself (C^1 at the ends)
  enum class Shape { flat, smootherstep, smoothstep2 };
  explicit CutoffProfile(Shape shape = Shape::flat);

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  Shape shape() const { return shape_; }
  std::string name() const;

  // Sampled maxima of |sigma'| and |sigma''|.
  double max_d1() const;
  double max_d2() const;

 private:
  Shape shape_;
};

// Plateau bump f_{delta,R}: ramps of width `ramp` rising to delta, plateau of
// length R/delta - ramp, so that the integral is exactly R.
class BumpProfile {
 public:
  BumpProfile(double delta, double R, double ramp = 2.0);

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  // F(t) = int_0^t f, closed form.
  double integral(double t) const;
  double support_end() const { return 2.0 * ramp_ + plateau_; }
  double delta() const { return delta_; }
  double total() const { return R_; }

  struct Check {
    double support_end, sup_f, sup_df, sup_ddf, quadrature, quadrature_rel_error;
    bool ok;
  };
  Check verify(double step = 1e-3) const;

 private:
  double delta_, R_, ramp_, plateau_;
};

// Lattice in R^2 with basis columns v1, v2.
struct Lattice2D {
  Eigen::Vector2d v1{1.0, 0.0};
  Eigen::Vector2d v2{0.0, 1.0};

  Eigen::Matrix2d basis() const;
  double covolume() const;
  Lattice2D reduced() const;  // Lagrange-Gauss reduction
  double injectivity_radius() const;
  // Intrinsic diameter of the flat torus R^2 / lattice (covering radius).
  double diameter() const;
  bool is_reduced(double tol = 1e-12) const;
};

struct TubeGeometry {
  double core_length = 0.0;
  double radius = 0.0;
  double meridian_length = 0.0;  // 2 pi sinh R
  double boundary_area = 0.0;    // 2 pi l sinh R cosh R
  double longitude_length = 0.0; // l cosh R
  Lattice2D boundary;            // boundary torus; rectangular unless a twist is known
  // l cosh R <= 2 mu
  bool margulis(double mu) const { return core_length * std::cosh(radius) <= 2.0 * mu; }
};

struct ModelMetric {
  WarpedMetric metric;
  std::optional<TubeGeometry> tube;
};

ModelMetric hyperbolic_tube(double core_length, double R, double step = 1e-3, double r_min = 0.1);
WarpedMetric hyperbolic_cusp(double r_min, double r_max, double step = 1e-3);  // a = b = e^{-r}
WarpedMetric expanding_cusp(double r_min, double r_max, double step = 1e-3);   // a = b = e^r / 2
WarpedMetric flat_product(double r_min, double r_max, double step = 1e-3);

struct FuterBound {
  double radius = 0.0;
  double argument = 0.0;  // eps / sqrt(8 l)
  bool vacuous = false;
};
FuterBound futer_radius_bound(double core_length, double eps);

// a = (1-s) sinh r + s e^r/2, b = (1-s) cosh r + s e^r/2 with s = sigma(r - Rhat).
WarpedMetric drilling_interpolation(double Rhat, const CutoffProfile& sigma, double r_min, double r_max,
                                    double step = 1e-3);
// t = r - R: a = e^r/2 - sigma(t) e^{-r}/2, b = e^r/2 + sigma(t) e^{-r}/2; tube for t <= -1, cusp for t >= 0.
WarpedMetric filling_interpolation(double R, const CutoffProfile& sigma, double r_min, double r_max,
                                   double step = 1e-3);

struct CounterexampleParams {
  double delta = 0.01;
  double R = 1.0;          // total stretch exponent
  double m = 2.0;          // hyperbolic collar depth below the boundary torus
  double tube_radius = 0;  // 0: chosen to fit the support plus margin, at most 300
  Lattice2D boundary;      // flat boundary torus; fixes the core length by area
  double step = 1e-3;
  double delta_max = 0.05;  // calibrated admissible range
};

struct Counterexample {
  WarpedMetric metric;   // tube with stretched y-warp
  TubeGeometry tube;
  BumpProfile bump;
  double stretch_factor = 1.0;  // far-end b / b_hyp
  bool delta_warning = false;
};

// Depth t = tube_radius - r from the boundary torus; b = cosh r * exp(F(t - m)).
Counterexample counterexample_metric(const CounterexampleParams& p);

struct RicciDeficit {
  double value = 0.0;     // int inj^{-(2-lambda)} |Ric + 2g|^2 dvol
  double bound = 0.0;     // c D0^2 eps^2 int_m^{Rad-1} e^{-lambda t/2} dt
  double eps = 0.0;       // sup |sec + 1|
  double D0 = 0.0;        // intrinsic diameter of the boundary torus
  double inj_boundary = 0.0;
  double ratio = 0.0;     // value / (D0^2 eps^2 int ...)
};
// Calibrated constant c of the deficit bound.
double ricci_deficit_constant();
RicciDeficit weighted_ricci_deficit(const WarpedMetric& metric, const TubeGeometry& tube, double lambda, double m);

struct SmallPartConstants {
  double mu = 0.1;
  double D = 0.1;
  double D_prime = 0.05;
  // C = 2D (4 sqrt2 D / (3 D') + 1)
  double count_constant() const;
};

struct PreimageCount {
  std::int64_t count = 0;
  double inj = 0.0;
  double bound = 0.0;  // C / inj
  bool preconditions_met = true;  // radius <= D, inj <= D, diameter >= D'
  bool holds() const { return static_cast<double>(count) <= bound; }
};
// Lattice points in the closed ball of the given radius about the origin.
std::int64_t lattice_points_in_ball(const Lattice2D& lat, double radius);
PreimageCount lattice_preimage_count(const Lattice2D& lat, double radius, const SmallPartConstants& k = {});

struct SparsityResult {
  double sum = 0.0;
  double bound = 0.0;
  bool holds() const { return sum <= bound * (1 + 1e-12); }
};
// Checks #{i : d_i <= r} <= m e^{kappa' r}; throws HypothesisError naming the violating r.
void check_growth_condition(const std::vector<double>& distances, double kappa_prime, double m);
SparsityResult sparsity_sum(const std::vector<double>& distances, double delta, double kappa_prime, double m);

}  // namespace pinchlab
