#include "pinchlab/pointwise.hpp"

#include <algorithm>
#include <cmath>

#include "pinchlab/errors.hpp"

namespace pinchlab {

CurvatureTensor::CurvatureTensor(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {
  if (n < 2) throw DomainError("curvature tensor: dimension must be at least 2");
}

CurvatureTensor CurvatureTensor::operator+(const CurvatureTensor& o) const {
  CurvatureTensor r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

CurvatureTensor CurvatureTensor::operator-(const CurvatureTensor& o) const {
  CurvatureTensor r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

CurvatureTensor CurvatureTensor::operator*(double s) const {
  CurvatureTensor r(*this);
  for (auto& v : r.data_) v *= s;
  return r;
}

double CurvatureTensor::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double CurvatureTensor::symmetry_defect() const {
  const auto& R = *this;
  double d = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          d = std::max(d, std::abs(R(i, j, k, l) + R(j, i, k, l)));
          d = std::max(d, std::abs(R(i, j, k, l) + R(i, j, l, k)));
          d = std::max(d, std::abs(R(i, j, k, l) - R(k, l, i, j)));
          d = std::max(d, std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
        }
  return d;
}

CurvatureTensor constant_curvature(int n, double kappa) {
  CurvatureTensor R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      R(i, j, j, i) = kappa;
      R(i, j, i, j) = -kappa;
    }
  return R;
}

CurvatureTensor kulkarni_nomizu(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  CurvatureTensor R(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int w = 0; w < n; ++w)
          R(x, y, z, w) = A(x, w) * B(y, z) + A(y, z) * B(x, w) - A(x, z) * B(y, w) - A(y, w) * B(x, z);
  return R;
}

CurvatureTensor random_curvature(int n, double kappa, double deviation, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CurvatureTensor D(n);
  // Kulkarni-Nomizu squares of symmetric matrices span the algebraic curvature tensors.
  const int terms = n * (n + 1) / 2 + 2;
  for (int t = 0; t < terms; ++t) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) A(i, j) = A(j, i) = gauss(rng);
    double sign = (t % 2 == 0) ? 1.0 : -1.0;
    D = D + kulkarni_nomizu(A, A) * sign;
  }
  double nd = D.norm();
  if (nd > 0.0) D = D * (deviation / nd);
  return constant_curvature(n, kappa) + D;
}

Eigen::MatrixXd ricci(const CurvatureTensor& rm) {
  const int n = rm.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i) ric(a, b) += rm(a, i, i, b);
  return ric;
}

void require_symmetric(const PointwiseTensor& h, double tol) {
  if (h.rows() != h.cols()) throw ContractViolation("tensor must be square");
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw ContractViolation("tensor must be symmetric");
}

void require_curvature(const CurvatureTensor& rm, double tol) {
  double scale = std::max(1.0, rm.norm());
  if (rm.symmetry_defect() > tol * scale)
    throw ContractViolation("curvature tensor lacks the algebraic curvature symmetries");
}

PointwiseTensor weitzenboeck(const PointwiseTensor& h, const CurvatureTensor& rm) {
  require_symmetric(h);
  if (h.rows() != rm.dim()) throw ContractViolation("dimension mismatch between tensor and curvature");
  require_curvature(rm);
  const int n = rm.dim();
  Eigen::MatrixXd ric = ricci(rm);
  Eigen::MatrixXd out = ric * h + h * ric;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) s += h(i, l) * rm(i, a, b, l);
      out(a, b) -= 2.0 * s;
    }
  return out;
}

double frame_inner(const PointwiseTensor& a, const PointwiseTensor& b) { return (a.array() * b.array()).sum(); }

PairingBound ric_pairing_bound(const PointwiseTensor& h, const CurvatureTensor& rm, double kappa) {
  const int n = rm.dim();
  PointwiseTensor w = weitzenboeck(h, rm);
  double hh = frame_inner(h, h);
  double tr = h.trace();
  PairingBound out;
  out.lhs = std::abs(0.5 * frame_inner(w, h) - kappa * (n * hh - tr * tr));
  out.rhs = (1.0 + std::sqrt(static_cast<double>(n))) * (rm - constant_curvature(n, kappa)).norm() * hh;
  out.scale = 0.5 * std::abs(frame_inner(w, h)) + std::abs(kappa) * (n * hh + tr * tr);
  return out;
}

Eigen::Matrix3d curvature_operator(const CurvatureTensor& rm) {
  if (rm.dim() != 3) throw DomainError("curvature operator on Lambda^2 is implemented for n = 3");
  static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  Eigen::Matrix3d M;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) M(p, q) = rm(pairs[p][0], pairs[p][1], pairs[q][1], pairs[q][0]);
  return 0.5 * (M + M.transpose());
}

double sup_sectional_deviation(const CurvatureTensor& rm, double kappa) {
  Eigen::Matrix3d M = curvature_operator(rm) - kappa * Eigen::Matrix3d::Identity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double deviation_constant_3d() { return 2.0 * std::sqrt(3.0); }

}  // namespace pinchlab
