#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccnli/fft.hpp"
#include "ccnli/symbol_frame.hpp"

namespace ccnli {

/// Finite set of distinct constellation points.
class Alphabet {
 public:
  /// Throws ConfigError for an empty set or repeated points.
  Alphabet(std::vector<cplx> points, std::string label);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<cplx>& points() const noexcept { return points_; }
  const cplx& operator[](std::size_t i) const { return points_[i]; }
  const std::string& label() const noexcept { return label_; }

  /// (1/m) sum |a_i|^2.
  double mean_energy() const;
  /// Copy scaled to unit mean energy.
  Alphabet normalized() const;
  /// Index of an exact member; throws ConfigError otherwise.
  std::size_t index_of(cplx point) const;

 private:
  std::vector<cplx> points_;
  std::string label_;
};

/// Square m-QAM with unit mean energy. Points are ordered by real part, then
/// imaginary part. m must be the square of an even integer.
Alphabet qam(std::size_t m);

/// The n points of least energy, renormalized to unit mean energy.
/// Energy shells are formed with a 1e-9 relative tolerance; inside a shell
/// points are taken in increasing (Re, Im) order.
Alphabet lowest_energy_subset(const Alphabet& a, std::size_t n);

/// Occurrence counts (w_1, ..., w_m) of the alphabet's points in a word.
struct Composition {
  std::vector<std::size_t> counts;

  std::size_t length() const;
  bool operator==(const Composition&) const = default;
};

/// Composition with every count equal to one.
Composition all_ones(std::size_t m);

/// A word over an alphabet, tagged with how it was generated.
struct CodewordFrame {
  std::vector<cplx> symbols;
  Scheme scheme = Scheme::iud;

  /// sum |a_i|^2, independent of symbol order to the last bit.
  double energy() const;
};

Composition type_of(const CodewordFrame& v, const Alphabet& a);

/// (1/n) log2(n! / (w_1! ... w_m!)) bits per symbol, via log-gamma.
double cc_rate(const Composition& c);

/// log2(m) - (1/m) log2(m!): rate lost by the all-ones CC code of length m
/// against IUD signalling over the same alphabet.
double rate_gap(std::size_t m);

/// `count` uniformly random permutations of u (Fisher-Yates, decreasing
/// index) drawn from one SplitMix64 stream seeded with `seed`.
std::vector<CodewordFrame> cc_frames(const CodewordFrame& u, std::size_t count,
                                     std::uint64_t seed);

/// `count` words of n symbols drawn independently and uniformly from a.
std::vector<CodewordFrame> iud_frames(const Alphabet& a, std::size_t n, std::size_t count,
                                      std::uint64_t seed);

/// The word listing every point of a once, in alphabet order.
CodewordFrame base_word(const Alphabet& a);

/// Symbols of consecutive frames, in order.
std::vector<cplx> concatenate(const std::vector<CodewordFrame>& frames);

/// CSV with header `j,re,im`.
void write_frame_csv(std::ostream& out, const CodewordFrame& frame);

}  // namespace ccnli
