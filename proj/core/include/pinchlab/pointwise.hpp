#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace pinchlab {

// Symmetric n x n matrix of components in an orthonormal frame.
using PointwiseTensor = Eigen::MatrixXd;

// Algebraic (0,4) curvature tensor in an orthonormal frame:
// (i,j,k,l) = <R(e_i,e_j)e_k, e_l>, so sec(e_i,e_j) = (i,j,j,i).
class CurvatureTensor {
 public:
  explicit CurvatureTensor(int n = 3);

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  CurvatureTensor operator+(const CurvatureTensor& o) const;
  CurvatureTensor operator-(const CurvatureTensor& o) const;
  CurvatureTensor operator*(double s) const;

  double norm() const;  // Frobenius norm over all n^4 components
  // Largest violation of antisymmetry, pair symmetry and the first Bianchi identity.
  double symmetry_defect() const;

 private:
  int index(int i, int j, int k, int l) const { return ((i * n_ + j) * n_ + k) * n_ + l; }
  int n_;
  std::vector<double> data_;
};

// Rm^kappa(x,y,z,w) = kappa(<y,z><x,w> - <x,z><y,w>).
CurvatureTensor constant_curvature(int n, double kappa);

// Kulkarni-Nomizu product, normalised so that (g ∧ g)/2 * kappa = Rm^kappa.
CurvatureTensor kulkarni_nomizu(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Rm^kappa plus a random algebraic curvature tensor of Frobenius norm `deviation`.
CurvatureTensor random_curvature(int n, double kappa, double deviation, std::mt19937_64& rng);

// Ricci endomorphism Ric(x) = sum_i R(x,e_i)e_i as a symmetric matrix.
Eigen::MatrixXd ricci(const CurvatureTensor& rm);

// Throws ContractViolation if h is not symmetric or rm lacks curvature symmetries.
void require_symmetric(const PointwiseTensor& h, double tol = 1e-12);
void require_curvature(const CurvatureTensor& rm, double tol = 1e-10);

// Ric(h)(x,y) = h(Ric x, y) + h(x, Ric y) - 2 tr h(., R(., x)y).
PointwiseTensor weitzenboeck(const PointwiseTensor& h, const CurvatureTensor& rm);

struct PairingBound {
  double lhs = 0.0;  // |1/2 <Ric(h),h> - kappa(n|h|^2 - tr(h)^2)|
  double rhs = 0.0;  // (1 + sqrt n) |Rm - Rm^kappa| |h|^2
  double scale = 0.0;  // magnitude of the cancelling terms, for the roundoff slack
  bool holds() const { return lhs <= rhs * (1.0 + 1e-12) + 1e-13 * scale; }
};

PairingBound ric_pairing_bound(const PointwiseTensor& h, const CurvatureTensor& rm, double kappa);

double frame_inner(const PointwiseTensor& a, const PointwiseTensor& b);

// n = 3 only: the curvature operator on Lambda^2 in the basis
// (e1^e2, e1^e3, e2^e3); its diagonal entries are sectional curvatures.
Eigen::Matrix3d curvature_operator(const CurvatureTensor& rm);

// sup over 2-planes of |sec - kappa|; exact in dimension 3 (largest
// eigenvalue modulus of the curvature operator minus kappa).
double sup_sectional_deviation(const CurvatureTensor& rm, double kappa);

// Sharp constant c(3) in sup|sec - kappa| <= |Rm - Rm^kappa| <= c(3) sup|sec - kappa|.
double deviation_constant_3d();

}  // namespace pinchlab
