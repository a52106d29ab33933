#pragma once

#include <complex>

namespace spinlab {

/// In-place 2D complex FFT on an N x N row-major plane.
///
/// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED: planning is then a
/// pure function of N (no runtime measurement), which keeps repeated runs
/// bitwise reproducible, and execution is safe on any caller buffer.
/// Plan creation is serialized internally; execution is thread-safe.
class Fft2 {
 public:
  explicit Fft2(int N);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  int N() const { return n_; }

  /// Unnormalized forward transform (exponent -i k x).
  void forward(std::complex<double>* plane) const;

  /// Inverse transform including the 1/N^2 normalization.
  void backward(std::complex<double>* plane) const;

 private:
  int n_;
  void* fwd_;
  void* bwd_;
};

}  // namespace spinlab
