#pragma once

#include <Eigen/Dense>
#include <array>

#include "pinchlab/pointwise.hpp"

namespace pinchlab {

// Coordinates (x1, x2, r) are indexed 0, 1, 2; metrics depend on r only.
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

// Metric components and their first two r-derivatives at one point.
struct MetricJet {
  Mat3 g = Mat3::Identity();
  Mat3 dg = Mat3::Zero();
  Mat3 ddg = Mat3::Zero();
};

// Tensor components with all first and second partials (index 2 is r).
struct TensorJet {
  Mat3 h = Mat3::Zero();
  std::array<Mat3, 3> dh{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  std::array<std::array<Mat3, 3>, 3> ddh{};

  TensorJet();
  // Jet of a tensor depending on r only.
  static TensorJet radial(const Mat3& h, const Mat3& dh, const Mat3& ddh);
};

// Levi-Civita data of a metric jet.
struct PointGeometry {
  Mat3 g, ginv;
  std::array<Mat3, 3> gamma;   // gamma[k](i,j) = Gamma^k_ij
  std::array<Mat3, 3> dgamma;  // r-derivative of gamma
  // riemann[a][b](c,d) = R_abc^d with R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z
  std::array<std::array<Mat3, 3>, 3> riemann;
  Mat3 ricci;       // Ric_bc = R_abc^a
  Mat3 ricci_endo;  // ricci_endo(d,a) = Ric^d_a, i.e. Ric(d_a) = Ric^d_a d_d
};

PointGeometry point_geometry(const MetricJet& jet);

// Frame matrix E (columns e_i) with E^T g E = I, obtained from the Cholesky factor.
Mat3 orthonormal_frame(const Mat3& g);

// <R(e_i,e_j)e_k,e_l> in the orthonormal frame E.
CurvatureTensor frame_curvature(const PointGeometry& p, const Mat3& E);

// Weitzenboeck operator on coordinate components.
Mat3 weitzenboeck_coord(const PointGeometry& p, const Mat3& h);

struct CovariantJet {
  std::array<Mat3, 3> nabla;                  // nabla[c](a,b) = (D_c h)_ab
  std::array<std::array<Mat3, 3>, 3> hessian; // hessian[i][j](a,b) = (D^2 h)(d_i, d_j; d_a, d_b)
  Mat3 rough_laplacian;                       // -g^ij hessian[i][j]
};

CovariantJet covariant_jet(const PointGeometry& p, const TensorJet& t);

// L h = 1/2 (D*D h + Ric(h)) + (n-1) h with n = 3.
Mat3 linearized_einstein_coord(const PointGeometry& p, const TensorJet& t);

// beta_ref(g) = delta_ref g + 1/2 d tr_ref g as a covector with its r-derivative.
struct CovectorJet {
  Vec3 value = Vec3::Zero();
  Vec3 dr = Vec3::Zero();
};
CovectorJet bianchi_coord(const MetricJet& ref, const MetricJet& g);

// Phi_ref(g) = Ric(g) + 2g + 1/2 Lie_{beta^sharp} g, coordinate components.
Mat3 einstein_operator_coord(const MetricJet& g, const MetricJet& ref);

}  // namespace pinchlab
