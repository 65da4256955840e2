#include "ccnli/symbol_frame.hpp"

#include "ccnli/error.hpp"

namespace ccnli {

std::string_view to_string(Scheme s) { return s == Scheme::cc ? "cc" : "iud"; }

SymbolFrame::SymbolFrame(int channels_half, std::size_t length)
    : m_(channels_half), length_(length) {
  if (channels_half < 0) throw ConfigError("SymbolFrame: M must be non-negative");
  if (length == 0) throw ConfigError("SymbolFrame: length must be positive");
  a_.assign(static_cast<std::size_t>(2 * m_ + 1) * length_, cplx{});
  schemes_.assign(static_cast<std::size_t>(2 * m_ + 1), Scheme::iud);
}

std::size_t SymbolFrame::offset(int k) const {
  if (k < -m_ || k > m_) throw ConfigError("SymbolFrame: channel index out of range");
  return static_cast<std::size_t>(k + m_) * length_;
}

const cplx& SymbolFrame::cyclic(int k, long j) const {
  const long n = static_cast<long>(length_);
  long r = j % n;
  if (r < 0) r += n;
  return a_[offset(k) + static_cast<std::size_t>(r)];
}

SymbolFrame SymbolFrame::scaled(double alpha) const {
  SymbolFrame out = *this;
  for (auto& v : out.a_) v *= alpha;
  return out;
}

}  // namespace ccnli
