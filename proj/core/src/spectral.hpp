#pragma once

#include <fftw3.h>

#include <complex>
#include <functional>
#include <vector>

#include "pinchlab/model_metrics.hpp"

namespace pinchlab::detail {

// Fourier multipliers on an n1 x n2 periodic grid of R^2 / lattice, with
// wave vectors xi = 2 pi B^{-T} m for coordinates x = B s.
class SpectralTorus {
 public:
  // multiplier(xi1, xi2, nyquist)
  using Multiplier = std::function<std::complex<double>(double, double, bool)>;

  SpectralTorus(const Lattice2D& lat, std::size_t n1, std::size_t n2);
  ~SpectralTorus();
  SpectralTorus(const SpectralTorus&) = delete;
  SpectralTorus& operator=(const SpectralTorus&) = delete;

  std::size_t size() const { return n1_ * n2_; }
  // out[d] = real part of the inverse transform of mult[d] * fft(f); one forward transform.
  void apply(const double* f, const std::vector<Multiplier>& mult, const std::vector<double*>& out);

 private:
  std::size_t n1_, n2_;
  fftw_complex *buf_, *spec_, *out_;
  fftw_plan fwd_, bwd_;
  std::vector<double> xi1_, xi2_;
  std::vector<bool> nyq_;
};

}  // namespace pinchlab::detail
