#include "ccnli/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include "ccnli/csv.hpp"
#include "ccnli/error.hpp"
#include "ccnli/rng.hpp"

namespace ccnli {
namespace {

bool lex_less(cplx a, cplx b) {
  return std::tuple(a.real(), a.imag()) < std::tuple(b.real(), b.imag());
}

}  // namespace

Alphabet::Alphabet(std::vector<cplx> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  if (points_.empty()) throw ConfigError("Alphabet: no points");
  for (const auto& p : points_)
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw ConfigError("Alphabet: non-finite point");
  std::vector<cplx> sorted = points_;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("Alphabet: repeated point");
}

double Alphabet::mean_energy() const {
  double e = 0.0;
  for (const auto& p : points_) e += std::norm(p);
  return e / static_cast<double>(points_.size());
}

Alphabet Alphabet::normalized() const {
  const double e = mean_energy();
  if (!(e > 0.0)) throw ConfigError("Alphabet: zero mean energy cannot be normalized");
  const double scale = 1.0 / std::sqrt(e);
  std::vector<cplx> p = points_;
  for (auto& v : p) v *= scale;
  return Alphabet(std::move(p), label_);
}

std::size_t Alphabet::index_of(cplx point) const {
  const auto it = std::find(points_.begin(), points_.end(), point);
  if (it == points_.end()) throw ConfigError("Alphabet: symbol is not a member");
  return static_cast<std::size_t>(it - points_.begin());
}

Alphabet qam(std::size_t m) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  if (m == 0 || side * side != m || side % 2 != 0)
    throw ConfigError("qam: size must be the square of an even integer, got " + std::to_string(m));
  std::vector<cplx> p;
  p.reserve(m);
  const double offset = static_cast<double>(side) - 1.0;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t i = 0; i < side; ++i)
      p.emplace_back(2.0 * static_cast<double>(r) - offset, 2.0 * static_cast<double>(i) - offset);
  return Alphabet(std::move(p), "qam" + std::to_string(m)).normalized();
}

Alphabet lowest_energy_subset(const Alphabet& a, std::size_t n) {
  if (n == 0 || n > a.size())
    throw ConfigError("lowest_energy_subset: need 0 < n <= " + std::to_string(a.size()));
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::norm(a[x]) < std::norm(a[y]); });
  // Shell index: consecutive energies within the tolerance share a shell.
  std::vector<std::size_t> shell(a.size());
  std::size_t current = 0;
  double anchor = std::norm(a[order[0]]);
  for (const auto idx : order) {
    const double e = std::norm(a[idx]);
    if (e - anchor > 1e-9 * std::max(e, 1e-300)) {
      ++current;
      anchor = e;
    }
    shell[idx] = current;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (shell[x] != shell[y]) return shell[x] < shell[y];
    return lex_less(a[x], a[y]);
  });
  std::vector<cplx> p;
  p.reserve(n);
  for (std::size_t i = 0; i < n; ++i) p.push_back(a[order[i]]);
  return Alphabet(std::move(p), a.label() + "-lowest" + std::to_string(n)).normalized();
}

std::size_t Composition::length() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Composition all_ones(std::size_t m) { return Composition{std::vector<std::size_t>(m, 1)}; }

double CodewordFrame::energy() const {
  // Summed in sorted order so that every permutation gives the same bits.
  std::vector<double> e(symbols.size());
  std::transform(symbols.begin(), symbols.end(), e.begin(), [](cplx s) { return std::norm(s); });
  std::sort(e.begin(), e.end());
  return std::accumulate(e.begin(), e.end(), 0.0);
}

Composition type_of(const CodewordFrame& v, const Alphabet& a) {
  Composition c{std::vector<std::size_t>(a.size(), 0)};
  for (const auto& s : v.symbols) ++c.counts[a.index_of(s)];
  return c;
}

double cc_rate(const Composition& c) {
  const std::size_t n = c.length();
  if (n == 0) throw ConfigError("cc_rate: empty composition");
  double log_count = std::lgamma(static_cast<double>(n) + 1.0);
  for (const auto w : c.counts) log_count -= std::lgamma(static_cast<double>(w) + 1.0);
  return log_count / std::numbers::ln2 / static_cast<double>(n);
}

double rate_gap(std::size_t m) {
  if (m == 0) throw ConfigError("rate_gap: m must be positive");
  return std::log2(static_cast<double>(m)) - cc_rate(all_ones(m));
}

std::vector<CodewordFrame> cc_frames(const CodewordFrame& u, std::size_t count,
                                     std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<CodewordFrame> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    CodewordFrame f{u.symbols, Scheme::cc};
    for (std::size_t i = f.symbols.size(); i > 1; --i) {
      const std::size_t r = static_cast<std::size_t>(rng.below(i));
      std::swap(f.symbols[i - 1], f.symbols[r]);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<CodewordFrame> iud_frames(const Alphabet& a, std::size_t n, std::size_t count,
                                      std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<CodewordFrame> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    CodewordFrame f{std::vector<cplx>(n), Scheme::iud};
    for (auto& s : f.symbols) s = a[static_cast<std::size_t>(rng.below(a.size()))];
    out.push_back(std::move(f));
  }
  return out;
}

CodewordFrame base_word(const Alphabet& a) { return CodewordFrame{a.points(), Scheme::cc}; }

std::vector<cplx> concatenate(const std::vector<CodewordFrame>& frames) {
  std::vector<cplx> out;
  for (const auto& f : frames) out.insert(out.end(), f.symbols.begin(), f.symbols.end());
  return out;
}

void write_frame_csv(std::ostream& out, const CodewordFrame& frame) {
  out << "j,re,im\n";
  for (std::size_t j = 0; j < frame.symbols.size(); ++j)
    out << j << ',' << format_double(frame.symbols[j].real()) << ','
        << format_double(frame.symbols[j].imag()) << '\n';
}

}  // namespace ccnli
