#include "pinchlab/geometry.hpp"

#include <cmath>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {

// First-order forward-mode number carrying an r-derivative.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
inline Dual& operator-=(Dual& a, Dual b) { return a = a - b; }

inline double value(double x) { return x; }
inline double value(Dual x) { return x.v; }

template <class T>
using M3 = std::array<std::array<T, 3>, 3>;
template <class T>
using C3 = std::array<M3<T>, 3>;

template <class T>
M3<T> zero3() {
  M3<T> m;
  for (auto& row : m) row.fill(T{});
  return m;
}

template <class T>
M3<T> inverse3(const M3<T>& m) {
  M3<T> c;
  c[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  c[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  c[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  c[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  c[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  c[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  c[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  c[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  c[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  T det = m[0][0] * c[0][0] + m[0][1] * c[1][0] + m[0][2] * c[2][0];
  if (!(std::abs(value(det)) > 0.0)) throw DomainError("degenerate metric");
  for (auto& row : c)
    for (auto& x : row) x = x / det;
  return c;
}

// Gamma^k_ij for a metric depending on r = x^2 only.
template <class T>
C3<T> christoffel(const M3<T>& g, const M3<T>& dg) {
  M3<T> gi = inverse3(g);
  auto dpart = [&](int c, int a, int b) { return c == 2 ? dg[a][b] : T{}; };
  C3<T> G;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s{};
        for (int l = 0; l < 3; ++l) s += gi[k][l] * (dpart(i, j, l) + dpart(j, i, l) - dpart(l, i, j));
        G[k][i][j] = 0.5 * s;
      }
  return G;
}

template <class T>
std::array<T, 3> bianchi_t(const M3<T>& ref, const M3<T>& dref, const M3<T>& g, const M3<T>& dg) {
  C3<T> G = christoffel(ref, dref);
  M3<T> ri = inverse3(ref);
  // (ref^{-1})' = -ref^{-1} ref' ref^{-1}
  M3<T> dri = zero3<T>();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s{};
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += ri[i][k] * dref[k][l] * ri[l][j];
      dri[i][j] = -s;
    }
  T dtr{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dtr += dri[i][j] * g[i][j] + ri[i][j] * dg[i][j];
  std::array<T, 3> beta{};
  for (int b = 0; b < 3; ++b) {
    T s{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T cov = (i == 2) ? dg[j][b] : T{};
        for (int k = 0; k < 3; ++k) cov -= G[k][i][j] * g[k][b] + G[k][i][b] * g[j][k];
        s += ri[i][j] * cov;
      }
    beta[b] = -s;
    if (b == 2) beta[b] += 0.5 * dtr;
  }
  return beta;
}

M3<Dual> dual_of(const Mat3& v, const Mat3& d) {
  M3<Dual> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = {v(i, j), d(i, j)};
  return m;
}

}  // namespace

TensorJet::TensorJet() {
  for (auto& row : ddh) row.fill(Mat3::Zero());
}

TensorJet TensorJet::radial(const Mat3& h, const Mat3& dh, const Mat3& ddh) {
  TensorJet t;
  t.h = h;
  t.dh[2] = dh;
  t.ddh[2][2] = ddh;
  return t;
}

PointGeometry point_geometry(const MetricJet& jet) {
  PointGeometry p;
  p.g = jet.g;
  C3<Dual> G = christoffel(dual_of(jet.g, jet.dg), dual_of(jet.dg, jet.ddg));
  for (int k = 0; k < 3; ++k) {
    p.gamma[k] = Mat3::Zero();
    p.dgamma[k] = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        p.gamma[k](i, j) = G[k][i][j].v;
        p.dgamma[k](i, j) = G[k][i][j].d;
      }
  }
  p.ginv = jet.g.inverse();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Mat3 R = Mat3::Zero();
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double s = 0.0;
          if (a == 2) s += p.dgamma[d](b, c);
          if (b == 2) s -= p.dgamma[d](a, c);
          for (int e = 0; e < 3; ++e) s += p.gamma[e](b, c) * p.gamma[d](a, e) - p.gamma[e](a, c) * p.gamma[d](b, e);
          R(c, d) = s;
        }
      p.riemann[a][b] = R;
    }
  p.ricci = Mat3::Zero();
  for (int b = 0; b < 3; ++b)
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a) p.ricci(b, c) += p.riemann[a][b](c, a);
  p.ricci_endo = Mat3::Zero();
  for (int a = 0; a < 3; ++a)
    for (int d = 0; d < 3; ++d)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p.ricci_endo(d, a) += p.ginv(i, j) * p.riemann[a][i](j, d);
  return p;
}

Mat3 orthonormal_frame(const Mat3& g) {
  Eigen::LLT<Mat3> llt(g);
  if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
  Mat3 L = llt.matrixL();
  return L.transpose().inverse();
}

CurvatureTensor frame_curvature(const PointGeometry& p, const Mat3& E) {
  // lowered Rm_abcd = R_abc^e g_ed
  double low[3][3][3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Mat3 Rl = p.riemann[a][b] * p.g;
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) low[a][b][c][d] = Rl(c, d);
    }
  CurvatureTensor out(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double s = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) s += low[a][b][c][d] * E(a, i) * E(b, j) * E(c, k) * E(d, l);
          out(i, j, k, l) = s;
        }
  return out;
}

Mat3 weitzenboeck_coord(const PointGeometry& p, const Mat3& h) {
  Mat3 out = p.ricci_endo.transpose() * h + h * p.ricci_endo;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (p.ginv(i, j) == 0.0) continue;
          for (int k = 0; k < 3; ++k) s += p.ginv(i, j) * p.riemann[j][a](b, k) * h(i, k);
        }
      out(a, b) -= 2.0 * s;
    }
  return out;
}

CovariantJet covariant_jet(const PointGeometry& p, const TensorJet& t) {
  const auto& G = p.gamma;
  CovariantJet cj;
  auto conn = [&](int j, const Mat3& h) {
    // sum_k Gamma^k_ja h_kb + Gamma^k_jb h_ak
    Mat3 m = Mat3::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += G[k](j, a) * h(k, b) + G[k](j, b) * h(a, k);
        m(a, b) = s;
      }
    return m;
  };
  for (int j = 0; j < 3; ++j) cj.nabla[j] = t.dh[j] - conn(j, t.h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // d_i T_jab
      Mat3 dT = t.ddh[i][j] - conn(j, t.dh[i]);
      if (i == 2) {
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += p.dgamma[k](j, a) * t.h(k, b) + p.dgamma[k](j, b) * t.h(a, k);
            dT(a, b) -= s;
          }
      }
      Mat3 H = dT;
      for (int k = 0; k < 3; ++k) H -= G[k](i, j) * cj.nabla[k];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double s = 0.0;
          for (int k = 0; k < 3; ++k) s += G[k](i, a) * cj.nabla[j](k, b) + G[k](i, b) * cj.nabla[j](a, k);
          H(a, b) -= s;
        }
      cj.hessian[i][j] = H;
    }
  cj.rough_laplacian = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cj.rough_laplacian -= p.ginv(i, j) * cj.hessian[i][j];
  return cj;
}

Mat3 linearized_einstein_coord(const PointGeometry& p, const TensorJet& t) {
  CovariantJet cj = covariant_jet(p, t);
  return 0.5 * (cj.rough_laplacian + weitzenboeck_coord(p, t.h)) + 2.0 * t.h;
}

CovectorJet bianchi_coord(const MetricJet& ref, const MetricJet& g) {
  auto beta = bianchi_t(dual_of(ref.g, ref.dg), dual_of(ref.dg, ref.ddg), dual_of(g.g, g.dg), dual_of(g.dg, g.ddg));
  CovectorJet out;
  for (int b = 0; b < 3; ++b) {
    out.value(b) = beta[b].v;
    out.dr(b) = beta[b].d;
  }
  return out;
}

Mat3 einstein_operator_coord(const MetricJet& g, const MetricJet& ref) {
  PointGeometry p = point_geometry(g);
  CovectorJet beta = bianchi_coord(ref, g);
  // X = g^{-1} beta and its r-derivative
  Mat3 gi = p.ginv;
  Mat3 dgi = -gi * g.dg * gi;
  Vec3 X = gi * beta.value;
  Vec3 dX = dgi * beta.value + gi * beta.dr;
  Mat3 lie = X(2) * g.dg;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) {
        if (a == 2) s += g.g(c, b) * dX(c);
        if (b == 2) s += g.g(a, c) * dX(c);
      }
      lie(a, b) += s;
    }
  return p.ricci + 2.0 * g.g + 0.5 * lie;
}

}  // namespace pinchlab
