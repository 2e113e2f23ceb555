#include "spectral.hpp"

#include <mutex>
#include <numbers>

namespace pinchlab::detail {

namespace {
// the FFTW planner is not thread-safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralTorus::SpectralTorus(const Lattice2D& lat, std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2) {
  const std::size_t m = n1 * n2;
  std::lock_guard<std::mutex> lock(planner_mutex());
  buf_ = fftw_alloc_complex(m);
  spec_ = fftw_alloc_complex(m);
  out_ = fftw_alloc_complex(m);
  fwd_ = fftw_plan_dft_2d(static_cast<int>(n2), static_cast<int>(n1), buf_, spec_, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_2d(static_cast<int>(n2), static_cast<int>(n1), out_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  Eigen::Matrix2d Binv_t = lat.basis().inverse().transpose();
  xi1_.resize(m);
  xi2_.resize(m);
  nyq_.resize(m);
  auto wave = [](std::size_t k, std::size_t n) {
    long kk = static_cast<long>(k);
    long nn = static_cast<long>(n);
    return static_cast<double>(kk <= nn / 2 ? kk : kk - nn);
  };
  for (std::size_t k2 = 0; k2 < n2; ++k2)
    for (std::size_t k1 = 0; k1 < n1; ++k1) {
      Eigen::Vector2d mm(wave(k1, n1), wave(k2, n2));
      Eigen::Vector2d xi = 2.0 * std::numbers::pi * Binv_t * mm;
      std::size_t j = k2 * n1 + k1;
      xi1_[j] = xi(0);
      xi2_[j] = xi(1);
      nyq_[j] = (n1 % 2 == 0 && k1 == n1 / 2) || (n2 % 2 == 0 && k2 == n2 / 2);
    }
}

SpectralTorus::~SpectralTorus() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
  fftw_free(spec_);
  fftw_free(out_);
}

void SpectralTorus::apply(const double* f, const std::vector<Multiplier>& mult, const std::vector<double*>& out) {
  const std::size_t m = size();
  for (std::size_t j = 0; j < m; ++j) {
    buf_[j][0] = f[j];
    buf_[j][1] = 0.0;
  }
  fftw_execute(fwd_);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t d = 0; d < mult.size(); ++d) {
    for (std::size_t j = 0; j < m; ++j) {
      std::complex<double> v = mult[d](xi1_[j], xi2_[j], nyq_[j]) * std::complex<double>(spec_[j][0], spec_[j][1]);
      out_[j][0] = v.real() * scale;
      out_[j][1] = v.imag() * scale;
    }
    fftw_execute(bwd_);
    for (std::size_t j = 0; j < m; ++j) out[d][j] = buf_[j][0];
  }
}

}  // namespace pinchlab::detail
