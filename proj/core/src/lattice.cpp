#include <algorithm>
#include <cmath>

#include "pinchlab/errors.hpp"
#include "pinchlab/model_metrics.hpp"

namespace pinchlab {

Eigen::Matrix2d Lattice2D::basis() const {
  Eigen::Matrix2d B;
  B.col(0) = v1;
  B.col(1) = v2;
  return B;
}

double Lattice2D::covolume() const { return std::abs(v1.x() * v2.y() - v1.y() * v2.x()); }

Lattice2D Lattice2D::reduced() const {
  if (!(covolume() > 0.0)) throw DomainError("lattice basis vectors are linearly dependent");
  Eigen::Vector2d a = v1, b = v2;
  if (a.squaredNorm() > b.squaredNorm()) std::swap(a, b);
  for (int iter = 0; iter < 10000; ++iter) {
    double mu = std::round(a.dot(b) / a.squaredNorm());
    b -= mu * a;
    if (b.squaredNorm() >= a.squaredNorm()) break;
    std::swap(a, b);
  }
  if (a.dot(b) < 0.0) b = -b;
  return {a, b};
}

double Lattice2D::injectivity_radius() const { return 0.5 * reduced().v1.norm(); }

double Lattice2D::diameter() const {
  Lattice2D r = reduced();
  // (0, v1, v2) is a non-obtuse Delaunay triangle; its circumradius is the covering radius
  double a = r.v1.norm(), b = r.v2.norm(), c = (r.v1 - r.v2).norm();
  return a * b * c / (2.0 * r.covolume());
}

bool Lattice2D::is_reduced(double tol) const {
  double n1 = v1.squaredNorm(), n2 = v2.squaredNorm();
  return n1 <= n2 * (1 + tol) && 2.0 * std::abs(v1.dot(v2)) <= n1 * (1 + tol);
}

double SmallPartConstants::count_constant() const {
  return 2.0 * D * (4.0 * std::sqrt(2.0) * D / (3.0 * D_prime) + 1.0);
}

std::int64_t lattice_points_in_ball(const Lattice2D& lat, double radius) {
  if (radius < 0.0) return 0;
  Lattice2D r = lat.reduced();
  const double rr = radius * radius * (1.0 + 1e-12) + 1e-300;
  const double n11 = r.v1.squaredNorm(), n12 = r.v1.dot(r.v2), n22 = r.v2.squaredNorm();
  const double height = r.covolume() / r.v1.norm();
  const auto nmax = static_cast<std::int64_t>(std::floor(radius / height + 1e-9)) + 1;
  std::int64_t count = 0;
  for (std::int64_t n = -nmax; n <= nmax; ++n) {
    double dn = static_cast<double>(n);
    // n11 m^2 + 2 n n12 m + n^2 n22 - rr <= 0
    double disc = dn * dn * (n12 * n12 - n11 * n22) + n11 * rr;
    if (disc < 0.0) continue;
    double centre = -dn * n12 / n11, half = std::sqrt(disc) / n11;
    auto lo = static_cast<std::int64_t>(std::floor(centre - half)) - 1;
    auto hi = static_cast<std::int64_t>(std::ceil(centre + half)) + 1;
    for (std::int64_t m = lo; m <= hi; ++m) {
      double dm = static_cast<double>(m);
      if (dm * dm * n11 + 2 * dm * dn * n12 + dn * dn * n22 <= rr) ++count;
    }
  }
  return count;
}

PreimageCount lattice_preimage_count(const Lattice2D& lat, double radius, const SmallPartConstants& k) {
  PreimageCount out;
  out.count = lattice_points_in_ball(lat, radius);
  out.inj = lat.injectivity_radius();
  out.bound = k.count_constant() / out.inj;
  out.preconditions_met = radius <= k.D && out.inj <= k.D && lat.diameter() >= k.D_prime;
  return out;
}

}  // namespace pinchlab
