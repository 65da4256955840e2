#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ccnli/fft.hpp"

namespace ccnli {

/// How a channel's symbols were generated.
enum class Scheme { cc, iud };

std::string_view to_string(Scheme s);

/// Channel symbols a_{k,j} for k in [-M, M] and j in [0, J).
class SymbolFrame {
 public:
  SymbolFrame(int channels_half, std::size_t length);

  int channels_half() const noexcept { return m_; }
  int channel_count() const noexcept { return 2 * m_ + 1; }
  std::size_t length() const noexcept { return length_; }

  cplx& at(int k, std::size_t j) { return a_[offset(k) + j]; }
  const cplx& at(int k, std::size_t j) const { return a_[offset(k) + j]; }

  /// a_{k, j mod J}; negative j wraps.
  const cplx& cyclic(int k, long j) const;

  std::span<cplx> channel(int k) { return {a_.data() + offset(k), length_}; }
  std::span<const cplx> channel(int k) const { return {a_.data() + offset(k), length_}; }

  Scheme scheme(int k) const { return schemes_[static_cast<std::size_t>(k + m_)]; }
  void set_scheme(int k, Scheme s) { schemes_[static_cast<std::size_t>(k + m_)] = s; }

  /// Every symbol multiplied by alpha.
  SymbolFrame scaled(double alpha) const;

 private:
  std::size_t offset(int k) const;

  int m_;
  std::size_t length_;
  std::vector<cplx> a_;
  std::vector<Scheme> schemes_;
};

}  // namespace ccnli
