#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ccnli {

using cplx = std::complex<double>;

/// One-dimensional complex FFT of fixed length backed by FFTW.
///
/// Plans are created with FFTW_ESTIMATE on buffers owned by the object, so
/// the algorithm choice (and therefore the floating-point result) does not
/// depend on timing or on the alignment of caller memory. Transforms are
/// unnormalized in both directions: backward(forward(x)) == n * x.
///
/// Instances are movable but not copyable; one instance must not be used
/// from two threads at the same time.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// X[m] = sum_n x[n] exp(-2 pi i m n / N). In-place allowed.
  void forward(std::span<const cplx> in, std::span<cplx> out);
  /// x[n] = sum_m X[m] exp(+2 pi i m n / N). In-place allowed.
  void backward(std::span<const cplx> in, std::span<cplx> out);

  void forward(std::vector<cplx>& data) { forward(data, data); }
  void backward(std::vector<cplx>& data) { backward(data, data); }

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

/// Frequency of FFT bin `m` for an n-point grid with sample spacing dt.
/// Bins m >= n/2 map to negative frequencies (the Nyquist bin is negative).
inline double bin_frequency(std::size_t m, std::size_t n, double dt) {
  const auto sm = static_cast<double>(m);
  const auto sn = static_cast<double>(n);
  return (2 * m < n ? sm : sm - sn) / (sn * dt);
}

/// Signed bin index in [-n/2, n/2).
inline long signed_bin(std::size_t m, std::size_t n) {
  return 2 * m < n ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

/// Storage index of a signed bin.
inline std::size_t bin_index(long b, std::size_t n) {
  const long sn = static_cast<long>(n);
  long r = b % sn;
  if (r < 0) r += sn;
  return static_cast<std::size_t>(r);
}

}  // namespace ccnli
