#include "pinchlab/cusp_ode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "pinchlab/errors.hpp"
#include "spectral.hpp"

namespace pinchlab {

std::string to_string(BlockTag t) {
  switch (t) {
    case BlockTag::trace: return "trace";
    case BlockTag::h33: return "h33";
    case BlockTag::hi3: return "hi3";
    case BlockTag::hij: return "hij";
  }
  return "trace";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::trivial_variation: return "trivial_variation";
    case Classification::zero: return "zero";
    case Classification::rejected: return "rejected";
  }
  return "rejected";
}

OdeBlock OdeBlock::of(BlockTag tag) {
  OdeBlock q;
  q.tag = tag;
  q.b = -2.0;
  switch (tag) {
    case BlockTag::trace:
    case BlockTag::h33:
      q.c = -4.0;
      q.lambda1 = 1.0 + std::sqrt(5.0);
      q.lambda2 = 1.0 - std::sqrt(5.0);
      break;
    case BlockTag::hi3:
      q.c = -3.0;
      q.lambda1 = 3.0;
      q.lambda2 = -1.0;
      break;
    case BlockTag::hij:
      q.c = 0.0;
      q.lambda1 = 2.0;
      q.lambda2 = 0.0;
      break;
  }
  return q;
}

double TrivialEinsteinVariation::norm() const { return std::sqrt(u11 * u11 + 2 * u12 * u12 + u22 * u22); }

Mat3 TrivialEinsteinVariation::frame() const {
  Mat3 m = Mat3::Zero();
  m(0, 0) = u11;
  m(0, 1) = m(1, 0) = u12;
  m(1, 1) = u22;
  return m;
}

SymRadialTensor TrivialEinsteinVariation::on(const RadialGrid& grid) const {
  Mat3 m = frame();
  return SymRadialTensor::from_function(grid, [&](double) { return m; });
}

double SystemResiduals::max_over(std::size_t i0, std::size_t i1) const {
  double s = 0.0;
  for (std::size_t i = i0; i <= i1 && i < grid.n; ++i) {
    for (const auto& v : component) s = std::max(s, std::abs(v[i]));
    s = std::max(s, std::abs(trace[i]));
  }
  return s;
}

double SystemResiduals::max_interior() const { return max_over(2, grid.n - 3); }

namespace {

struct Derivs {
  std::vector<double> v, d, dd;
};

Derivs derivs(const std::vector<double>& v, double h) { return {v, d1(v, h), d2(v, h)}; }

// Coefficient of the zeroth-order term per frame component.
constexpr std::array<double, 6> kZeroOrder{-4.0, -3.0, -3.0, 0.0, 0.0, 0.0};

// Homogeneous part of the block system, i.e. -2 L h in frame components.
std::array<std::vector<double>, 6> block_part(const SymRadialTensor& h, std::vector<double>* trace_part) {
  const double step = h.grid.step;
  const std::size_t n = h.grid.n;
  std::array<std::vector<double>, 6> out;
  std::vector<double> tr(n);
  for (std::size_t i = 0; i < n; ++i) tr[i] = h.trace_at(i);
  for (int k = 0; k < 6; ++k) {
    Derivs D = derivs(h.c[k], step);
    out[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = D.dd[i] - 2.0 * D.d[i] + kZeroOrder[k] * D.v[i];
      if (k == k11 || k == k22) v -= 2.0 * (tr[i] - h.c[k33][i]);
      out[k][i] = v;
    }
  }
  if (trace_part) {
    Derivs T = derivs(tr, step);
    trace_part->resize(n);
    for (std::size_t i = 0; i < n; ++i) (*trace_part)[i] = T.dd[i] - 2.0 * T.d[i] - 4.0 * T.v[i];
  }
  return out;
}

// sum_i w_i^2 weighted frame norm of the difference at node i
double frame_dist(const SymRadialTensor& h, std::size_t i, const Mat3& u) { return (h.at(i) - u).norm(); }

// (int_0^h e^{l u} du, int_0^h u e^{l u} du)
std::pair<double, double> moments(double l, double h) {
  double x = l * h;
  if (std::abs(x) < 1e-3) {
    double p0 = h * (1 + x / 2 + x * x / 6 + x * x * x / 24);
    double p1 = h * h * (0.5 + x / 3 + x * x / 8 + x * x * x / 30);
    return {p0, p1};
  }
  double em = std::expm1(x);
  return {em / l, h * (em + 1.0) / l - em / (l * l)};
}

// P with (D - l) P = F, P = 0 at the start (forward) or the end (backward);
// F is taken piecewise linear between nodes and each panel is integrated exactly.
std::vector<double> first_order(double l, const RadialGrid& grid, const std::vector<double>& F, bool forward) {
  const std::size_t n = grid.n;
  const double h = grid.step;
  std::vector<double> P(n, 0.0);
  if (forward) {
    auto [p0, p1] = moments(l, h);
    const double e = std::exp(l * h);
    const double a = p1 / h, b = p0 - p1 / h;  // weights of F_i and F_{i+1}
    for (std::size_t i = 0; i + 1 < n; ++i) P[i + 1] = e * P[i] + a * F[i] + b * F[i + 1];
  } else {
    auto [q0, q1] = moments(-l, h);
    const double e = std::exp(-l * h);
    const double a = q0 - q1 / h, b = q1 / h;
    for (std::size_t i = n - 1; i-- > 0;) P[i] = e * P[i + 1] - (a * F[i] + b * F[i + 1]);
  }
  return P;
}

void require_solvable(const RadialGrid& grid, const std::vector<double>& forcing) {
  if (grid.n < 2) throw ResolutionError("solve_block: interval shorter than one grid step");
  if (forcing.size() != grid.n) throw GridMismatch("solve_block: forcing length differs from grid size");
  for (double f : forcing)
    if (!std::isfinite(f)) throw DomainError("solve_block: forcing must be finite");
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  sx /= m;
  sy /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - sx) * (x[i] - sx);
    sxy += (x[i] - sx) * (y[i] - sy);
  }
  double slope = sxy / sxx;
  if (intercept) *intercept = sy - slope * sx;
  return slope;
}

}  // namespace

SystemResiduals assemble_system(const SymRadialTensor& h, const SymRadialTensor& f) {
  if (!h.grid.same_as(f.grid)) throw GridMismatch("assemble_system: h and f grids differ");
  SystemResiduals r;
  r.grid = h.grid;
  r.component = block_part(h, &r.trace);
  for (int k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < h.grid.n; ++i) r.component[k][i] += 2.0 * f.c[k][i];
  for (std::size_t i = 0; i < h.grid.n; ++i) r.trace[i] += 2.0 * f.trace_at(i);
  return r;
}

SymRadialTensor cusp_operator(const SymRadialTensor& h) {
  auto parts = block_part(h, nullptr);
  SymRadialTensor out = SymRadialTensor::zeros(h.grid);
  for (int k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < h.grid.n; ++i) out.c[k][i] = -0.5 * parts[k][i];
  return out;
}

std::array<DecoupledMode, 6> decouple(const SymRadialTensor& h) {
  const std::size_t n = h.grid.n;
  std::vector<double> D(n), S(n);
  for (std::size_t i = 0; i < n; ++i) {
    D[i] = h.c[k11][i] - h.c[k22][i];
    S[i] = h.c[k11][i] + h.c[k22][i];
  }
  return {DecoupledMode{"h33", OdeBlock::of(BlockTag::h33), h.c[k33]},
          DecoupledMode{"h13", OdeBlock::of(BlockTag::hi3), h.c[k13]},
          DecoupledMode{"h23", OdeBlock::of(BlockTag::hi3), h.c[k23]},
          DecoupledMode{"h12", OdeBlock::of(BlockTag::hij), h.c[k12]},
          DecoupledMode{"h11-h22", OdeBlock::of(BlockTag::hij), D},
          DecoupledMode{"h11+h22", OdeBlock::of(BlockTag::trace), S}};
}

std::vector<double> solve_block(const OdeBlock& block, const RadialGrid& grid, const std::vector<double>& forcing,
                                double y0, double dy0) {
  require_solvable(grid, forcing);
  const double l1 = block.lambda1, l2 = block.lambda2, gap = l1 - l2;
  const double c1 = (dy0 - l2 * y0) / gap, c2 = (l1 * y0 - dy0) / gap;
  auto P1 = first_order(l1, grid, forcing, true);
  auto P2 = first_order(l2, grid, forcing, true);
  std::vector<double> y(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double t = grid.r(i) - grid.r_min;
    y[i] = c1 * std::exp(l1 * t) + c2 * std::exp(l2 * t) + (P1[i] - P2[i]) / gap;
  }
  return y;
}

std::vector<double> solve_block_bvp(const OdeBlock& block, const RadialGrid& grid, const std::vector<double>& forcing,
                                    double y_start, double y_end) {
  require_solvable(grid, forcing);
  const double l1 = block.lambda1, l2 = block.lambda2, gap = l1 - l2;
  const double L = grid.r_max() - grid.r_min;
  // Each exponential is anchored where it is largest, so no term overflows.
  auto anchored = [&](double l, double t) { return l > 0.0 ? std::exp(l * (t - L)) : std::exp(l * t); };
  auto P1 = first_order(l1, grid, forcing, !(l1 > 0.0));
  auto P2 = first_order(l2, grid, forcing, !(l2 > 0.0));
  std::vector<double> yp(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) yp[i] = (P1[i] - P2[i]) / gap;
  Eigen::Matrix2d M;
  M << anchored(l1, 0.0), anchored(l2, 0.0), anchored(l1, L), anchored(l2, L);
  Eigen::Vector2d rhs(y_start - yp.front(), y_end - yp.back());
  Eigen::Vector2d A = M.fullPivLu().solve(rhs);
  std::vector<double> y(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double t = grid.r(i) - grid.r_min;
    y[i] = yp[i] + A(0) * anchored(l1, t) + A(1) * anchored(l2, t);
  }
  return y;
}

GrowthFit fit_growth_exponent(const RadialGrid& grid, const std::vector<double>& y, double r_lo, double r_hi,
                              Tail tail) {
  if (y.size() != grid.n) throw GridMismatch("fit_growth_exponent: sample count differs from grid size");
  std::size_t i0 = grid.nearest(r_lo), i1 = grid.nearest(r_hi);
  if (i1 < i0 + 2) throw ResolutionError("fit_growth_exponent: window needs at least 3 nodes");
  GrowthFit fit;
  // sign changes or exact zeros split the window
  std::size_t a = i0, b = i1;
  for (std::size_t i = i0; i < i1; ++i) {
    bool cross = y[i] == 0.0 || y[i] * y[i + 1] < 0.0;
    if (!cross) continue;
    fit.split = true;
    if (tail == Tail::right) {
      a = i + 1;
    } else if (b == i1) {
      b = i;
    }
  }
  if (y[i1] == 0.0) fit.split = true;
  while (a <= b && y[a] == 0.0) ++a;
  while (b > a && y[b] == 0.0) --b;
  if (b < a + 2) throw ResolutionError("fit_growth_exponent: tail segment after splitting has fewer than 3 nodes");
  std::vector<double> x, ly;
  for (std::size_t i = a; i <= b; ++i) {
    x.push_back(grid.r(i));
    ly.push_back(std::log(std::abs(y[i])));
  }
  fit.slope = linear_slope(x, ly, &fit.intercept);
  fit.r_lo = grid.r(a);
  fit.r_hi = grid.r(b);
  return fit;
}

Torus3DGrid Torus3DGrid::zeros(const Lattice2D& lattice, std::size_t n1, std::size_t n2, const RadialGrid& grid) {
  if (n1 < 4 || n2 < 4) throw ResolutionError("torus grid needs at least 4 samples per direction");
  if (!(lattice.covolume() > 0.0)) throw DomainError("torus grid: degenerate lattice");
  Torus3DGrid t;
  t.lattice = lattice;
  t.n1 = n1;
  t.n2 = n2;
  t.grid = grid;
  for (auto& v : t.c) v.assign(n1 * n2 * grid.n, 0.0);
  return t;
}

Torus3DGrid Torus3DGrid::from_function(const Lattice2D& lattice, std::size_t n1, std::size_t n2,
                                       const RadialGrid& grid,
                                       const std::function<Mat3(const Eigen::Vector2d&, double)>& frame) {
  Torus3DGrid t = zeros(lattice, n1, n2, grid);
  for (std::size_t ir = 0; ir < grid.n; ++ir)
    for (std::size_t i2 = 0; i2 < n2; ++i2)
      for (std::size_t i1 = 0; i1 < n1; ++i1) t.set(i1, i2, ir, frame(t.point(i1, i2), grid.r(ir)));
  return t;
}

Eigen::Vector2d Torus3DGrid::point(std::size_t i1, std::size_t i2) const {
  double s1 = static_cast<double>(i1) / static_cast<double>(n1);
  double s2 = static_cast<double>(i2) / static_cast<double>(n2);
  return s1 * lattice.v1 + s2 * lattice.v2;
}

Mat3 Torus3DGrid::at(std::size_t i1, std::size_t i2, std::size_t ir) const {
  Mat3 m;
  std::size_t idx = index(i1, i2, ir);
  for (int k = 0; k < 6; ++k) {
    m(kCompIndex[k][0], kCompIndex[k][1]) = c[k][idx];
    m(kCompIndex[k][1], kCompIndex[k][0]) = c[k][idx];
  }
  return m;
}

void Torus3DGrid::set(std::size_t i1, std::size_t i2, std::size_t ir, const Mat3& m) {
  std::size_t idx = index(i1, i2, ir);
  for (int k = 0; k < 6; ++k) {
    int p = kCompIndex[k][0], q = kCompIndex[k][1];
    c[k][idx] = 0.5 * (m(p, q) + m(q, p));
  }
}

SymRadialTensor average(const Torus3DGrid& field) {
  SymRadialTensor out = SymRadialTensor::zeros(field.grid);
  const std::size_t slice = field.n1 * field.n2;
  for (int k = 0; k < 6; ++k)
    for (std::size_t ir = 0; ir < field.grid.n; ++ir) {
      double s = 0.0;
      for (std::size_t j = 0; j < slice; ++j) s += field.c[k][ir * slice + j];
      out.c[k][ir] = s / static_cast<double>(slice);
    }
  return out;
}

namespace {

// Spectral x-derivatives of one periodic slice: f_x1, f_x2, f_x1x1, f_x1x2, f_x2x2.
class SliceDerivatives {
 public:
  SliceDerivatives(const Lattice2D& lat, std::size_t n1, std::size_t n2) : torus_(lat, n1, n2) {
    using C = std::complex<double>;
    const C I(0.0, 1.0);
    mult_ = {
        [I](double x1, double, bool nyq) { return nyq ? C(0.0) : I * x1; },
        [I](double, double x2, bool nyq) { return nyq ? C(0.0) : I * x2; },
        [](double x1, double, bool) { return C(-x1 * x1); },
        [](double x1, double x2, bool nyq) { return nyq ? C(0.0) : C(-x1 * x2); },
        [](double, double x2, bool) { return C(-x2 * x2); },
    };
  }

  void apply(const double* f, std::array<double*, 5> out) {
    torus_.apply(f, mult_, std::vector<double*>(out.begin(), out.end()));
  }

 private:
  detail::SpectralTorus torus_;
  std::vector<detail::SpectralTorus::Multiplier> mult_;
};

MetricJet cusp_jet(double r) {
  MetricJet j;
  double e = std::exp(-2.0 * r);
  j.g = Vec3(e, e, 1.0).asDiagonal();
  j.dg = Vec3(-2.0 * e, -2.0 * e, 0.0).asDiagonal();
  j.ddg = Vec3(4.0 * e, 4.0 * e, 0.0).asDiagonal();
  return j;
}

}  // namespace

Torus3DGrid linearized_einstein_3d(const Torus3DGrid& field) {
  const std::size_t slice = field.n1 * field.n2, nr = field.grid.n, N = slice * nr;
  const double step = field.grid.step;
  if (nr < 5) throw ResolutionError("linearized_einstein_3d: radial grid needs at least 5 nodes");
  // frame components and their partials; the weights e^{-m r} are differentiated analytically
  std::array<std::array<std::vector<double>, 10>, 6> D;
  SliceDerivatives sd(field.lattice, field.n1, field.n2);
  for (int k = 0; k < 6; ++k) {
    auto& A = D[k];
    A[0] = field.c[k];
    for (std::size_t s = 1; s < 10; ++s) A[s].assign(N, 0.0);
    for (std::size_t ir = 0; ir < nr; ++ir) {
      std::size_t o = ir * slice;
      sd.apply(&A[0][o], {&A[1][o], &A[2][o], &A[3][o], &A[4][o], &A[5][o]});
    }
    // radial derivatives: 6 = f_r, 7 = f_rr, 8 = f_x1r, 9 = f_x2r
    std::vector<double> line(nr);
    for (std::size_t j = 0; j < slice; ++j) {
      for (auto [src, dst, second] : {std::tuple{0, 6, false}, std::tuple{0, 7, true}, std::tuple{1, 8, false},
                                      std::tuple{2, 9, false}}) {
        for (std::size_t ir = 0; ir < nr; ++ir) line[ir] = A[src][ir * slice + j];
        auto d = second ? d2(line, step) : d1(line, step);
        for (std::size_t ir = 0; ir < nr; ++ir) A[dst][ir * slice + j] = d[ir];
      }
    }
  }
  Torus3DGrid out = Torus3DGrid::zeros(field.lattice, field.n1, field.n2, field.grid);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    PointGeometry pg = point_geometry(cusp_jet(field.grid.r(ir)));
    Vec3 winv(std::exp(field.grid.r(ir)), std::exp(field.grid.r(ir)), 1.0);
    for (std::size_t j = 0; j < slice; ++j) {
      std::size_t idx = ir * slice + j;
      TensorJet t;
      for (int k = 0; k < 6; ++k) {
        int p = kCompIndex[k][0], q = kCompIndex[k][1];
        const double m = (p < 2 ? 1.0 : 0.0) + (q < 2 ? 1.0 : 0.0);
        const double W = std::exp(-m * field.grid.r(ir));
        auto v = [&](int slot) { return D[k][slot][idx]; };
        auto put = [&](Mat3& M, double x) { M(p, q) = M(q, p) = W * x; };
        put(t.h, v(0));
        put(t.dh[0], v(1));
        put(t.dh[1], v(2));
        put(t.dh[2], v(6) - m * v(0));
        put(t.ddh[0][0], v(3));
        put(t.ddh[0][1], v(4));
        put(t.ddh[1][0], v(4));
        put(t.ddh[1][1], v(5));
        put(t.ddh[2][2], v(7) - 2.0 * m * v(6) + m * m * v(0));
        put(t.ddh[0][2], v(8) - m * v(1));
        put(t.ddh[2][0], v(8) - m * v(1));
        put(t.ddh[1][2], v(9) - m * v(2));
        put(t.ddh[2][1], v(9) - m * v(2));
      }
      Mat3 L = linearized_einstein_coord(pg, t);
      Mat3 F = winv.asDiagonal() * L * winv.asDiagonal();
      std::size_t i1 = j % field.n1, i2 = j / field.n1;
      out.set(i1, i2, ir, F);
    }
  }
  return out;
}

AveragingReport averaging_report(const Torus3DGrid& field) {
  AveragingReport rep;
  rep.diameter = field.lattice.diameter();
  SymRadialTensor avg = average(field);
  const std::size_t slice = field.n1 * field.n2, nr = field.grid.n;
  SliceDerivatives sd(field.lattice, field.n1, field.n2);
  std::array<std::vector<double>, 6> dx1, dx2, dr;
  std::vector<double> scratch(slice * 3);
  for (int k = 0; k < 6; ++k) {
    dx1[k].assign(slice * nr, 0.0);
    dx2[k].assign(slice * nr, 0.0);
    for (std::size_t ir = 0; ir < nr; ++ir) {
      std::size_t o = ir * slice;
      sd.apply(&field.c[k][o], {&dx1[k][o], &dx2[k][o], &scratch[0], &scratch[slice], &scratch[2 * slice]});
    }
    dr[k].assign(slice * nr, 0.0);
    std::vector<double> line(nr);
    for (std::size_t j = 0; j < slice; ++j) {
      for (std::size_t ir = 0; ir < nr; ++ir) line[ir] = field.c[k][ir * slice + j];
      auto d = d1(line, field.grid.step);
      for (std::size_t ir = 0; ir < nr; ++ir) dr[k][ir * slice + j] = d[ir];
    }
  }
  rep.deviation.assign(nr, 0.0);
  rep.c1_norm.assign(nr, 0.0);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    const double r = field.grid.r(ir), er = std::exp(r);
    Mat3 mean = avg.at(ir);
    for (std::size_t j = 0; j < slice; ++j) {
      std::size_t idx = ir * slice + j;
      Mat3 h = field.at(j % field.n1, j / field.n1, ir);
      double dev = (h - mean).norm();
      double grad = 0.0;
      for (int k = 0; k < 6; ++k) {
        double w = kCompIndex[k][0] == kCompIndex[k][1] ? 1.0 : 2.0;
        grad += w * (er * er * (dx1[k][idx] * dx1[k][idx] + dx2[k][idx] * dx2[k][idx]) + dr[k][idx] * dr[k][idx]);
      }
      rep.deviation[ir] = std::max(rep.deviation[ir], dev);
      rep.c1_norm[ir] = std::max(rep.c1_norm[ir], h.norm() + std::sqrt(grad));
    }
    if (rep.c1_norm[ir] > 0.0)
      rep.constant = std::max(rep.constant, rep.deviation[ir] / (rep.diameter * std::exp(-r) * rep.c1_norm[ir]));
  }
  return rep;
}

ClassificationResult classify_bounded_solution(const SymRadialTensor& h, double lambda, const ClassifyConfig& cfg) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("classify_bounded_solution: lambda must lie in (0,1)");
  const RadialGrid& g = h.grid;
  if (g.r_max() - g.r_min < 20.0 - 1e-9)
    throw DomainError("classify_bounded_solution: two-sided window must have length >= 20");
  const std::size_t n = g.n;
  const double rc = 0.5 * (g.r_min + g.r_max());
  ClassificationResult res;
  double hmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) hmax = std::max(hmax, h.norm_at(i));
  if (hmax == 0.0) {
    res.kind = Classification::zero;
    return res;
  }
  double misfit = 0.0, d_const = 0.0, h12_const = 0.0;
  for (const auto& mode : decouple(h)) {
    std::array<double, 2> lam{mode.block.lambda1, mode.block.lambda2};
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    std::array<double, 2> scale{};
    for (int c = 0; c < 2; ++c)
      scale[c] = std::max(std::exp(lam[c] * (g.r_min - rc)), std::exp(lam[c] * (g.r_max() - rc)));
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) A(i, c) = std::exp(lam[c] * (g.r(i) - rc)) / scale[c];
      y(i) = mode.y[i];
    }
    Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    misfit = std::max(misfit, (A * coef - y).cwiseAbs().maxCoeff());
    for (int c = 0; c < 2; ++c) {
      double size = std::abs(coef(c));  // columns have unit sup on the window
      res.mode_size.emplace_back(mode.name + "@" + std::to_string(lam[c]), size);
      if (std::abs(lam[c]) > lambda) {
        res.violating = std::max(res.violating, size);
      } else if (mode.name == "h12") {
        h12_const = coef(c) / scale[c];
      } else if (mode.name == "h11-h22") {
        d_const = coef(c) / scale[c];
      }
    }
  }
  res.fit_residual = misfit / hmax;
  if (res.fit_residual > cfg.fit_residual)
    throw HypothesisError("classify_bounded_solution: input does not solve L h = 0 (relative misfit " +
                          std::to_string(res.fit_residual) + ")");
  res.u.u11 = 0.5 * d_const;
  res.u.u22 = -0.5 * d_const;
  res.u.u12 = h12_const;
  Mat3 uf = res.u.frame();
  for (std::size_t i = 0; i < n; ++i) res.remainder = std::max(res.remainder, frame_dist(h, i, uf));
  if (res.violating > cfg.tolerance) {
    res.kind = Classification::rejected;
  } else if (res.u.norm() <= cfg.tolerance) {
    res.kind = Classification::zero;
  } else {
    res.kind = Classification::trivial_variation;
  }
  return res;
}

TrivialEinsteinVariation canonical_variation(const SymRadialTensor& h, double c_r) {
  if (c_r < h.grid.r_min - 1e-12 || c_r > h.grid.r_max() + 1e-12)
    throw DomainError("canonical_variation: c_r outside the grid");
  std::size_t i = h.grid.nearest(c_r);
  TrivialEinsteinVariation u;
  u.u11 = 0.5 * (h.c[k11][i] - h.c[k22][i]);
  u.u22 = -u.u11;
  u.u12 = h.c[k12][i];
  return u;
}

GrowthBoundReport growth_bound_check(const RadialGrid& grid, const std::vector<double>& y, const OdeBlock& block,
                                     const std::vector<ExponentialTerm>& W, const std::vector<double>& psi, double a,
                                     double R) {
  if (y.size() != grid.n || psi.size() != grid.n) throw GridMismatch("growth_bound_check: sample count differs");
  if (R < 2.0) throw HypothesisError("growth_bound_check: R must be >= 2");
  if (std::abs(grid.r_min) > 1e-12 || std::abs(grid.r_max() - (R - 1.0)) > 0.5 * grid.step)
    throw HypothesisError("growth_bound_check: grid must cover [0, R-1]");
  if (!(block.lambda2 <= 0.0 && block.lambda1 > 0.0))
    throw HypothesisError("growth_bound_check: roots must satisfy lambda2 <= 0 < lambda1");
  if (a < 0.0) throw HypothesisError("growth_bound_check: a must be >= 0");
  for (const auto& t : W) {
    if (t.beta < 0.0) throw HypothesisError("growth_bound_check: W coefficients must be >= 0");
    if (std::abs(t.mu - block.lambda1) < 1e-9 || std::abs(t.mu - block.lambda2) < 1e-9)
      throw HypothesisError("growth_bound_check: W exponent coincides with a root");
  }
  for (double v : y)
    if (std::abs(v) > 1.0 + 1e-12) throw HypothesisError("growth_bound_check: |y| <= 1 violated");
  auto Wat = [&](double r) {
    double s = 0.0;
    for (const auto& t : W) s += t.beta * std::exp(t.mu * r);
    return s;
  };
  for (double r : {R - 2.0, R - 1.5, R - 1.0})
    if (Wat(r) > 10.0) throw HypothesisError("growth_bound_check: W is not O(1) on [R-2, R-1]");
  GrowthBoundReport rep;
  std::vector<double> apsi(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) apsi[i] = std::abs(psi[i]);
  rep.psi_l1 = simpson(apsi, grid.step);
  const double base = std::abs(y[0]) + Wat(0.0) + rep.psi_l1;
  rep.bound.resize(grid.n);
  rep.ratio.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double r = grid.r(i);
    rep.bound[i] = std::exp(block.lambda2 * r) * base + std::exp(block.lambda1 * (r - R)) + Wat(r) +
                   rep.psi_l1 * std::exp(-a * r);
    rep.ratio[i] = std::abs(y[i]) / rep.bound[i];
    rep.max_ratio = std::max(rep.max_ratio, rep.ratio[i]);
  }
  return rep;
}

}  // namespace pinchlab
