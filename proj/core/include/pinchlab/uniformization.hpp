#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pinchlab/model_metrics.hpp"

namespace pinchlab {

// Doubly periodic samples at x = B s, s = (i1/n1, i2/n2); index i2 * n1 + i1.
struct TorusGrid {
  Lattice2D lattice;
  std::size_t n1 = 32, n2 = 32;
  std::vector<double> values;

  static TorusGrid zeros(const Lattice2D& lattice, std::size_t n1, std::size_t n2);
  static TorusGrid from_function(const Lattice2D& lattice, std::size_t n1, std::size_t n2,
                                 const std::function<double(const Eigen::Vector2d&)>& f);
  Eigen::Vector2d point(std::size_t i1, std::size_t i2) const;
  double& at(std::size_t i1, std::size_t i2) { return values[i2 * n1 + i1]; }
  double at(std::size_t i1, std::size_t i2) const { return values[i2 * n1 + i1]; }
  // Throws ResolutionError below 8 points per direction.
  void validate() const;
  double mean() const;
  double integral() const;  // flat integral: mean times covolume
  double sup() const;
};

// g = e^rho g_flat with rho sampled on the flat torus.
using TorusConformalGrid = TorusGrid;

// Flat Laplacian Delta = -tr D^2, spectral.
TorusGrid laplacian(const TorusGrid& f);

struct GaussCurvature {
  TorusGrid K;
  double gauss_bonnet = 0.0;  // int K dvol_g
};
// K = 1/2 e^{-rho} Delta rho.
GaussCurvature gauss_curvature(const TorusConformalGrid& rho);

struct FlatNormalization {
  double c = 0.0;             // rho = rho_tilde + c
  TorusConformalGrid rho;     // on the rescaled lattice e^{-c/2} B
  double residual = 0.0;      // int rho dvol_g after rescaling
};
// c = -int rho_tilde e^{rho_tilde} / int e^{rho_tilde}.
FlatNormalization associated_flat_metric(const TorusConformalGrid& rho_tilde);

struct UniformizationConfig {
  double tol = 1e-10;     // sup norm of the Picard update
  int max_iter = 500;
  double divergence = 0.9;  // two consecutive update ratios above this abort
  double delta0 = 0.1;      // admissible amplitude of rho in sweeps
};

struct RecoveredRho {
  TorusConformalGrid rho;   // solves Delta rho = 2 K e^rho on the given lattice
  FlatNormalization normalized;
  double residual = 0.0;    // sup |Delta_g rho - 2K|
  double update = 0.0;      // last Picard update
  int iterations = 0;
};
// Picard iteration rho0 <- s Delta^{-1}(2 K e^{rho0}) on zero-mean functions, with the
// scale s = e^c chosen each step so that int K e^{rho0} = 0; rho = rho0 + c.
RecoveredRho recover_rho(const TorusGrid& K, const UniformizationConfig& cfg = {});

// Bound on sup|rho| / sup|K| for recovered conformal factors at amplitudes up to delta0.
double calibrated_uniformization_constant();

// e^{-2(n-1) D}.
double spectral_gap_bound(double diameter, int n);
// Smallest positive eigenvalue of the spectral Laplacian on the grid.
double first_eigenvalue(const Lattice2D& lattice, std::size_t n1, std::size_t n2);

}  // namespace pinchlab
