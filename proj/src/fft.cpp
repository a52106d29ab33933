#include "spinlab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace spinlab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2::Fft2(int N) : n_(N) {
  if (N < 2) throw std::invalid_argument("Fft2: N must be >= 2");
  std::vector<fftw_complex> scratch(static_cast<size_t>(N) * N);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_2d(N, N, scratch.data(), scratch.data(), FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_2d(N, N, scratch.data(), scratch.data(), FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("Fft2: planning failed");
}

Fft2::~Fft2() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft2::forward(std::complex<double>* plane) const {
  auto* p = reinterpret_cast<fftw_complex*>(plane);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft2::backward(std::complex<double>* plane) const {
  auto* p = reinterpret_cast<fftw_complex*>(plane);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  const long M = static_cast<long>(n_) * n_;
  for (long i = 0; i < M; ++i) plane[i] *= scale;
}

}  // namespace spinlab
