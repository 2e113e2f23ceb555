#include "pinchlab/tensor_core.hpp"

#include <algorithm>
#include <cmath>

#include "pinchlab/errors.hpp"

namespace pinchlab {

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::tube: return "tube";
    case MetricKind::cusp: return "cusp";
    case MetricKind::interpolated: return "interpolated";
    case MetricKind::deformed: return "deformed";
    case MetricKind::generic: return "generic";
  }
  return "generic";
}

WarpedMetric WarpedMetric::sample(const RadialGrid& grid, MetricKind kind,
                                  const std::function<WarpValues(double)>& profile) {
  WarpedMetric m;
  m.grid = grid;
  m.kind = kind;
  for (auto* v : {&m.a, &m.da, &m.dda, &m.b, &m.db, &m.ddb}) v->resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    WarpValues w = profile(grid.r(i));
    m.a[i] = w.a;
    m.da[i] = w.da;
    m.dda[i] = w.dda;
    m.b[i] = w.b;
    m.db[i] = w.db;
    m.ddb[i] = w.ddb;
  }
  m.validate();
  return m;
}

WarpValues WarpedMetric::at(std::size_t i) const { return {a[i], da[i], dda[i], b[i], db[i], ddb[i]}; }

MetricJet WarpedMetric::jet(std::size_t i) const {
  MetricJet j;
  j.g = Vec3(a[i] * a[i], b[i] * b[i], 1.0).asDiagonal();
  j.dg = Vec3(2 * a[i] * da[i], 2 * b[i] * db[i], 0.0).asDiagonal();
  j.ddg = Vec3(2 * (da[i] * da[i] + a[i] * dda[i]), 2 * (db[i] * db[i] + b[i] * ddb[i]), 0.0).asDiagonal();
  return j;
}

Vec3 WarpedMetric::frame_weights(std::size_t i) const { return {a[i], b[i], 1.0}; }

void WarpedMetric::validate() const {
  if (grid.n < 5) throw ResolutionError("warped metric needs at least 5 grid points");
  for (const auto* v : {&a, &da, &dda, &b, &db, &ddb})
    if (v->size() != grid.n) throw GridMismatch("warp profile length differs from grid size");
  if (kind == MetricKind::tube && grid.r_min < 0.1 - 1e-12)
    throw DomainError("tube metrics require r_min >= 0.1");
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw DomainError("warp profiles must be positive at r = " + std::to_string(grid.r(i)));
  }
}

WarpedMetric WarpedMetric::restricted(std::size_t i0, std::size_t i1) const {
  WarpedMetric m;
  m.kind = kind;
  m.grid = grid;
  m.grid.r_min = grid.r(i0);
  m.grid.n = i1 - i0 + 1;
  auto cut = [&](const std::vector<double>& v) { return std::vector<double>(v.begin() + i0, v.begin() + i1 + 1); };
  m.a = cut(a);
  m.da = cut(da);
  m.dda = cut(dda);
  m.b = cut(b);
  m.db = cut(db);
  m.ddb = cut(ddb);
  m.validate();
  return m;
}

DerivativeConsistency check_derivative_consistency(const WarpedMetric& m) {
  DerivativeConsistency out;
  const double h = m.grid.step;
  out.tolerance = 10.0 * h * h;
  auto rel = [](double fd, double stored, double v) {
    double scale = std::max({std::abs(stored), std::abs(v), 1e-300});
    return std::abs(fd - stored) / scale;
  };
  for (auto [v, dv, ddv] : {std::tuple{&m.a, &m.da, &m.dda}, std::tuple{&m.b, &m.db, &m.ddb}}) {
    auto f1 = d1(*v, h);
    auto f2 = d2(*v, h);
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.max_rel_d1 = std::max(out.max_rel_d1, rel(f1[i], (*dv)[i], (*v)[i]));
      out.max_rel_d2 = std::max(out.max_rel_d2, rel(f2[i], (*ddv)[i], (*v)[i]));
    }
  }
  return out;
}

SymRadialTensor SymRadialTensor::zeros(const RadialGrid& grid) {
  SymRadialTensor t;
  t.grid = grid;
  for (auto& v : t.c) v.assign(grid.n, 0.0);
  return t;
}

SymRadialTensor SymRadialTensor::from_function(const RadialGrid& grid, const std::function<Mat3(double)>& frame) {
  SymRadialTensor t = zeros(grid);
  for (std::size_t i = 0; i < grid.n; ++i) t.set(i, frame(grid.r(i)));
  return t;
}

Mat3 SymRadialTensor::at(std::size_t i) const {
  Mat3 m;
  for (int k = 0; k < 6; ++k) {
    m(kCompIndex[k][0], kCompIndex[k][1]) = c[k][i];
    m(kCompIndex[k][1], kCompIndex[k][0]) = c[k][i];
  }
  return m;
}

void SymRadialTensor::set(std::size_t i, const Mat3& m) {
  for (int k = 0; k < 6; ++k) {
    int p = kCompIndex[k][0], q = kCompIndex[k][1];
    c[k][i] = 0.5 * (m(p, q) + m(q, p));
  }
}

double frame_norm(const Mat3& m) { return m.norm(); }

double SymRadialTensor::norm_at(std::size_t i) const {
  double s = 0.0;
  for (int k = 0; k < 6; ++k) s += (kCompIndex[k][0] == kCompIndex[k][1] ? 1.0 : 2.0) * c[k][i] * c[k][i];
  return std::sqrt(s);
}

double SymRadialTensor::sup_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) s = std::max(s, norm_at(i));
  return s;
}

double SymRadialTensor::trace_at(std::size_t i) const { return c[k33][i] + c[k11][i] + c[k22][i]; }

SymRadialTensor& SymRadialTensor::operator+=(const SymRadialTensor& o) {
  if (!grid.same_as(o.grid)) throw GridMismatch("tensor grids differ");
  for (int k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < grid.n; ++i) c[k][i] += o.c[k][i];
  return *this;
}

SymRadialTensor& SymRadialTensor::operator-=(const SymRadialTensor& o) {
  if (!grid.same_as(o.grid)) throw GridMismatch("tensor grids differ");
  for (int k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < grid.n; ++i) c[k][i] -= o.c[k][i];
  return *this;
}

SymRadialTensor& SymRadialTensor::operator*=(double s) {
  for (auto& v : c)
    for (auto& x : v) x *= s;
  return *this;
}

SymRadialTensor operator+(SymRadialTensor a, const SymRadialTensor& b) { return a += b; }
SymRadialTensor operator-(SymRadialTensor a, const SymRadialTensor& b) { return a -= b; }
SymRadialTensor operator*(double s, SymRadialTensor a) { return a *= s; }

double CurvatureData::sup_sec_deviation(double k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i)
    s = std::max({s, std::abs(sec_rtheta[i] - k), std::abs(sec_ry[i] - k), std::abs(sec_thetay[i] - k)});
  return s;
}

CurvatureData curvature_of_warped(const WarpedMetric& m, double kappa) {
  m.validate();
  CurvatureData d;
  d.grid = m.grid;
  d.kappa = kappa;
  const std::size_t n = m.grid.n;
  for (auto* v : {&d.sec_rtheta, &d.sec_ry, &d.sec_thetay, &d.scalar, &d.dev_kappa}) v->resize(n);
  d.ricci.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double srt = -m.dda[i] / m.a[i];
    double sry = -m.ddb[i] / m.b[i];
    double sty = -m.da[i] * m.db[i] / (m.a[i] * m.b[i]);
    d.sec_rtheta[i] = srt;
    d.sec_ry[i] = sry;
    d.sec_thetay[i] = sty;
    d.ricci[i] = Vec3(srt + sty, sry + sty, srt + sry).asDiagonal();
    d.scalar[i] = d.ricci[i].trace();
    // each plane contributes four nonzero frame components of Rm - Rm^kappa
    double s = (srt - kappa) * (srt - kappa) + (sry - kappa) * (sry - kappa) + (sty - kappa) * (sty - kappa);
    d.dev_kappa[i] = 2.0 * std::sqrt(s);
  }
  return d;
}

double curvature_deviation(const CurvatureData& d, double kappa) {
  if (d.sec_rtheta.size() != d.grid.n) throw GridMismatch("curvature data is incomplete");
  if (kappa == d.kappa) return *std::max_element(d.dev_kappa.begin(), d.dev_kappa.end());
  double out = 0.0;
  for (std::size_t i = 0; i < d.grid.n; ++i) {
    double s = std::pow(d.sec_rtheta[i] - kappa, 2) + std::pow(d.sec_ry[i] - kappa, 2) +
               std::pow(d.sec_thetay[i] - kappa, 2);
    out = std::max(out, 2.0 * std::sqrt(s));
  }
  return out;
}

DeviationSandwich curvature_deviation_sandwich(const CurvatureData& d, double kappa) {
  DeviationSandwich s;
  s.sup_sec = d.sup_sec_deviation(kappa);
  s.dev = curvature_deviation(d, kappa);
  s.c3 = deviation_constant_3d();
  return s;
}

std::vector<MetricJet> RadialMetric::jets() const {
  const std::size_t n = grid.n;
  std::vector<MetricJet> out(n);
  for (int p = 0; p < 3; ++p)
    for (int q = p; q < 3; ++q) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = g[i](p, q);
      auto f1 = d1(v, grid.step);
      auto f2 = d2(v, grid.step);
      for (std::size_t i = 0; i < n; ++i) {
        out[i].g(p, q) = out[i].g(q, p) = v[i];
        out[i].dg(p, q) = out[i].dg(q, p) = f1[i];
        out[i].ddg(p, q) = out[i].ddg(q, p) = f2[i];
      }
    }
  return out;
}

RadialMetric to_radial(const WarpedMetric& m) {
  RadialMetric r;
  r.grid = m.grid;
  r.g.resize(m.grid.n);
  for (std::size_t i = 0; i < m.grid.n; ++i) r.g[i] = m.jet(i).g;
  return r;
}

double GeneralCurvature::sup_over(std::size_t i0, std::size_t i1) const {
  double s = 0.0;
  for (std::size_t i = i0; i <= i1 && i < sec_deviation.size(); ++i) s = std::max(s, sec_deviation[i]);
  return s;
}

GeneralCurvature curvature_of_radial(const RadialMetric& m, double kappa) {
  if (m.g.size() != m.grid.n) throw GridMismatch("metric samples differ from grid size");
  return curvature_of_jets(m.grid, m.jets(), kappa);
}

GeneralCurvature curvature_of_jets(const RadialGrid& grid, const std::vector<MetricJet>& jets, double kappa) {
  if (jets.size() != grid.n) throw GridMismatch("jets differ from grid size");
  GeneralCurvature out;
  out.grid = grid;
  const std::size_t n = grid.n;
  out.operator_eigenvalues.resize(n);
  out.sec_deviation.resize(n);
  out.dev_kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    PointGeometry p = point_geometry(jets[i]);
    CurvatureTensor rm = frame_curvature(p, orthonormal_frame(jets[i].g));
    Eigen::SelfAdjointEigenSolver<Mat3> es(curvature_operator(rm), Eigen::EigenvaluesOnly);
    out.operator_eigenvalues[i] = es.eigenvalues();
    out.sec_deviation[i] = (es.eigenvalues().array() - kappa).abs().maxCoeff();
    out.dev_kappa[i] = (rm - constant_curvature(3, kappa)).norm();
  }
  return out;
}

std::vector<Mat3> to_coordinates(const SymRadialTensor& h, const WarpedMetric& bg) {
  if (!h.grid.same_as(bg.grid)) throw GridMismatch("tensor and background grids differ");
  std::vector<Mat3> out(h.grid.n);
  for (std::size_t i = 0; i < h.grid.n; ++i) {
    Vec3 w = bg.frame_weights(i);
    out[i] = w.asDiagonal() * h.at(i) * w.asDiagonal();
  }
  return out;
}

SymRadialTensor to_frame(const std::vector<Mat3>& coord, const WarpedMetric& bg) {
  if (coord.size() != bg.grid.n) throw GridMismatch("coordinate samples differ from grid size");
  SymRadialTensor t = SymRadialTensor::zeros(bg.grid);
  for (std::size_t i = 0; i < bg.grid.n; ++i) {
    Vec3 w = bg.frame_weights(i).cwiseInverse();
    t.set(i, w.asDiagonal() * coord[i] * w.asDiagonal());
  }
  return t;
}

std::vector<TensorJet> radial_jets(const std::vector<Mat3>& coord, double step) {
  const std::size_t n = coord.size();
  std::vector<Mat3> dh(n, Mat3::Zero()), ddh(n, Mat3::Zero());
  for (int p = 0; p < 3; ++p)
    for (int q = p; q < 3; ++q) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = coord[i](p, q);
      auto f1 = d1(v, step);
      auto f2 = d2(v, step);
      for (std::size_t i = 0; i < n; ++i) {
        dh[i](p, q) = dh[i](q, p) = f1[i];
        ddh[i](p, q) = ddh[i](q, p) = f2[i];
      }
    }
  std::vector<TensorJet> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = TensorJet::radial(coord[i], dh[i], ddh[i]);
  return out;
}

std::vector<TensorJet> frame_jets(const SymRadialTensor& h, const WarpedMetric& bg) {
  if (!h.grid.same_as(bg.grid)) throw GridMismatch("tensor and background grids differ");
  const std::size_t n = h.grid.n;
  const double step = h.grid.step;
  std::array<std::vector<double>, 6> d, dd;
  for (int k = 0; k < 6; ++k) {
    d[k] = d1(h.c[k], step);
    dd[k] = d2(h.c[k], step);
  }
  std::vector<TensorJet> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<double, 3> w{bg.a[i], bg.b[i], 1.0}, dw{bg.da[i], bg.db[i], 0.0},
        ddw{bg.dda[i], bg.ddb[i], 0.0};
    Mat3 v, v1, v2;
    for (int k = 0; k < 6; ++k) {
      int p = kCompIndex[k][0], q = kCompIndex[k][1];
      double W = w[p] * w[q];
      double W1 = dw[p] * w[q] + w[p] * dw[q];
      double W2 = ddw[p] * w[q] + 2.0 * dw[p] * dw[q] + w[p] * ddw[q];
      double H = h.c[k][i];
      v(p, q) = v(q, p) = W * H;
      v1(p, q) = v1(q, p) = W1 * H + W * d[k][i];
      v2(p, q) = v2(q, p) = W2 * H + 2.0 * W1 * d[k][i] + W * dd[k][i];
    }
    out[i] = TensorJet::radial(v, v1, v2);
  }
  return out;
}

namespace {
Vec3 covector_to_frame(const Vec3& w, const WarpedMetric& ref, std::size_t i) {
  return {w(0) / ref.a[i], w(1) / ref.b[i], w(2)};
}

Mat3 coord_to_frame(const Mat3& m, const WarpedMetric& ref, std::size_t i) {
  Vec3 w = ref.frame_weights(i).cwiseInverse();
  return w.asDiagonal() * m * w.asDiagonal();
}

MetricJet tensor_jet_as_metric(const TensorJet& t) {
  MetricJet j;
  j.g = t.h;
  j.dg = t.dh[2];
  j.ddg = t.ddh[2][2];
  return j;
}
}  // namespace

std::vector<Vec3> bianchi(const WarpedMetric& ref, const WarpedMetric& g) {
  if (!ref.grid.same_as(g.grid)) throw GridMismatch("bianchi: grids differ");
  std::vector<Vec3> out(ref.grid.n);
  for (std::size_t i = 0; i < ref.grid.n; ++i)
    out[i] = covector_to_frame(bianchi_coord(ref.jet(i), g.jet(i)).value, ref, i);
  return out;
}

std::vector<Vec3> bianchi(const WarpedMetric& ref, const SymRadialTensor& t) {
  auto jets = frame_jets(t, ref);
  std::vector<Vec3> out(ref.grid.n);
  for (std::size_t i = 0; i < ref.grid.n; ++i)
    out[i] = covector_to_frame(bianchi_coord(ref.jet(i), tensor_jet_as_metric(jets[i])).value, ref, i);
  return out;
}

SymRadialTensor einstein_operator(const WarpedMetric& g, const WarpedMetric& ref) {
  if (!ref.grid.same_as(g.grid)) throw GridMismatch("einstein_operator: grids differ");
  SymRadialTensor out = SymRadialTensor::zeros(ref.grid);
  for (std::size_t i = 0; i < ref.grid.n; ++i)
    out.set(i, coord_to_frame(einstein_operator_coord(g.jet(i), ref.jet(i)), ref, i));
  return out;
}

std::vector<MetricJet> perturbed_jets(const WarpedMetric& ref, const SymRadialTensor& h) {
  auto jets = frame_jets(h, ref);
  std::vector<MetricJet> out(ref.grid.n);
  for (std::size_t i = 0; i < ref.grid.n; ++i) {
    MetricJet g = ref.jet(i);
    g.g += jets[i].h;
    g.dg += jets[i].dh[2];
    g.ddg += jets[i].ddh[2][2];
    out[i] = g;
  }
  return out;
}

SymRadialTensor einstein_operator_perturbed(const WarpedMetric& ref, const SymRadialTensor& h) {
  auto jets = perturbed_jets(ref, h);
  SymRadialTensor out = SymRadialTensor::zeros(ref.grid);
  for (std::size_t i = 0; i < ref.grid.n; ++i)
    out.set(i, coord_to_frame(einstein_operator_coord(jets[i], ref.jet(i)), ref, i));
  return out;
}

SymRadialTensor einstein_residual(const WarpedMetric& g) {
  SymRadialTensor out = SymRadialTensor::zeros(g.grid);
  for (std::size_t i = 0; i < g.grid.n; ++i) {
    MetricJet j = g.jet(i);
    PointGeometry p = point_geometry(j);
    out.set(i, coord_to_frame(p.ricci + 2.0 * j.g, g, i));
  }
  return out;
}

SymRadialTensor linearized_einstein(const SymRadialTensor& h, const WarpedMetric& background) {
  auto jets = frame_jets(h, background);
  SymRadialTensor out = SymRadialTensor::zeros(background.grid);
  for (std::size_t i = 0; i < background.grid.n; ++i) {
    PointGeometry p = point_geometry(background.jet(i));
    out.set(i, coord_to_frame(linearized_einstein_coord(p, jets[i]), background, i));
  }
  return out;
}

}  // namespace pinchlab
