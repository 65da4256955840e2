#include "ccnli/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace ccnli {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Impl(std::size_t n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf = fftw_alloc_complex(n);
    if (buf == nullptr) throw std::bad_alloc();
    const int ni = static_cast<int>(n);
    fwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (fwd == nullptr || bwd == nullptr) throw std::runtime_error("fftw planning failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
};

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Fft: size must be positive");
  impl_ = std::make_unique<Impl>(n);
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("Fft: size mismatch");
  std::memcpy(impl_->buf, in.data(), n_ * sizeof(cplx));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, n_ * sizeof(cplx));
}

void Fft::backward(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("Fft: size mismatch");
  std::memcpy(impl_->buf, in.data(), n_ * sizeof(cplx));
  fftw_execute(impl_->bwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, n_ * sizeof(cplx));
}

}  // namespace ccnli
