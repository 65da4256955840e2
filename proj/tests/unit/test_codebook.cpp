#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "ccnli/codebook.hpp"
#include "ccnli/error.hpp"
#include "oracles.hpp"

using namespace ccnli;

namespace {

// Pearson statistic of observed counts against a uniform expectation, in
// units of its standard deviation away from the mean (df = bins - 1).
double chi_square_z(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double x2 = 0.0;
  for (auto c : counts) x2 += std::pow(static_cast<double>(c) - expected, 2) / expected;
  const double df = static_cast<double>(counts.size() - 1);
  return (x2 - df) / std::sqrt(2.0 * df);
}

}  // namespace

TEST(Qam, UnitEnergyGrid) {
  const Alphabet q4 = qam(4);
  ASSERT_EQ(q4.size(), 4u);
  for (const auto& p : q4.points()) {
    EXPECT_NEAR(std::abs(p.real()), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(std::abs(p.imag()), 1.0 / std::numbers::sqrt2, 1e-15);
  }
  const Alphabet q64 = qam(64);
  EXPECT_NEAR(q64.mean_energy(), 1.0, 1e-12);
  std::set<double> re, im;
  for (const auto& p : q64.points()) {
    re.insert(p.real());
    im.insert(p.imag());
  }
  EXPECT_EQ(re.size(), 8u);
  EXPECT_EQ(im.size(), 8u);
  EXPECT_THROW(qam(32), ConfigError);
  EXPECT_THROW(qam(9), ConfigError);
}

TEST(Alphabet, Invariants) {
  EXPECT_THROW(Alphabet({}, "x"), ConfigError);
  EXPECT_THROW(Alphabet({cplx{1.0}, cplx{1.0}}, "x"), ConfigError);
  const Alphabet a({cplx{3.0}, cplx{0.0, 1.0}}, "x");
  EXPECT_NEAR(a.normalized().mean_energy(), 1.0, 1e-12);
  EXPECT_EQ(a.index_of({0.0, 1.0}), 1u);
  EXPECT_THROW(a.index_of({2.0, 0.0}), ConfigError);
}

TEST(LowestEnergySubset, Examples) {
  const Alphabet q16 = qam(16);
  const Alphabet all = lowest_energy_subset(q16, 16);
  EXPECT_EQ(all.size(), 16u);
  EXPECT_NEAR(all.mean_energy(), 1.0, 1e-12);
  const Alphabet inner = lowest_energy_subset(q16, 4);
  // The four innermost points of 16-QAM form a QPSK square.
  for (const auto& p : inner.points()) EXPECT_NEAR(std::abs(p), 1.0, 1e-12);
  const Alphabet cc = lowest_energy_subset(qam(256), 171);
  EXPECT_EQ(cc.size(), 171u);
  EXPECT_NEAR(cc.mean_energy(), 1.0, 1e-12);
  EXPECT_THROW(lowest_energy_subset(q16, 17), ConfigError);
  EXPECT_THROW(lowest_energy_subset(q16, 0), ConfigError);
}

TEST(LowestEnergySubset, PartialShellTieBreakIsLexicographic) {
  // 171 cuts through an energy shell of 256-QAM.
  const Alphabet q = qam(256);
  const Alphabet cc = lowest_energy_subset(q, 171);
  std::vector<double> energies;
  for (const auto& p : q.points()) energies.push_back(std::norm(p));
  std::sort(energies.begin(), energies.end());
  const double cut = energies[170];
  // Points below the cut are all present; the cut shell is filled in (Re, Im) order.
  std::vector<cplx> shell;
  for (const auto& p : q.points())
    if (std::abs(std::norm(p) - cut) <= 1e-9 * cut) shell.push_back(p);
  std::sort(shell.begin(), shell.end(),
            [](cplx a, cplx b) { return std::pair(a.real(), a.imag()) < std::pair(b.real(), b.imag()); });
  std::size_t below = 0;
  for (double e : energies)
    if (e < cut * (1 - 1e-9)) ++below;
  const std::size_t taken = 171 - below;
  ASSERT_GT(taken, 0u);
  ASSERT_LT(taken, shell.size());
  // The subset is renormalized by a common factor; its last point lies on the cut shell.
  const std::vector<cplx> chosen = cc.points();
  const double g = std::abs(chosen.back()) / std::sqrt(cut);
  for (std::size_t i = 0; i < shell.size(); ++i) {
    const cplx scaled = shell[i] * g;
    const bool present = std::any_of(chosen.begin(), chosen.end(),
                                     [&](cplx c) { return std::abs(c - scaled) < 1e-12; });
    EXPECT_EQ(present, i < taken) << "shell point " << i;
  }
}

TEST(TypeOf, Examples) {
  const Alphabet a = qam(4);
  CodewordFrame v{{a[0], a[0], a[1]}, Scheme::iud};
  const Composition c = type_of(v, a);
  EXPECT_EQ(c.counts, (std::vector<std::size_t>{2, 1, 0, 0}));
  std::swap(v.symbols[0], v.symbols[2]);
  EXPECT_EQ(type_of(v, a), c);
  EXPECT_EQ(type_of(base_word(a), a), all_ones(4));
}

TEST(Rate, Examples) {
  // 171 distinct symbols per codeword of length 171: about 6 bits per symbol.
  const double r171 = cc_rate(all_ones(171));
  EXPECT_GE(r171, 5.99);
  EXPECT_LE(r171, 6.01);
  EXPECT_NEAR(r171, oracle::log2_factorial(171) / 171.0, 1e-9);
  EXPECT_EQ(cc_rate(all_ones(1)), 0.0);
  EXPECT_NEAR(cc_rate(all_ones(4)), std::log2(24.0) / 4.0, 1e-12);
  EXPECT_NEAR(cc_rate({{2, 1, 0}}), std::log2(3.0) / 3.0, 1e-12);
  for (std::size_t m : {2u, 17u, 300u, 1024u})
    EXPECT_NEAR(cc_rate(all_ones(m)), oracle::log2_factorial(m) / static_cast<double>(m), 1e-9);
  EXPECT_THROW(cc_rate({{0, 0}}), ConfigError);
}

TEST(Rate, GapApproachesLog2e) {
  EXPECT_NEAR(rate_gap(2), 0.5, 1e-12);
  double prev = rate_gap(1);
  for (std::size_t m = 2; m <= 1024; ++m) {
    const double g = rate_gap(m);
    EXPECT_GT(g, prev);
    prev = g;
  }
  EXPECT_NEAR(rate_gap(1024), std::numbers::log2e, 0.01);
}

TEST(CcFrames, TypeAndEnergyAreInvariant) {
  const Alphabet a = lowest_energy_subset(qam(256), 171);
  const CodewordFrame u = base_word(a);
  const auto frames = cc_frames(u, 200, 11);
  const double e = u.energy();
  for (const auto& f : frames) {
    EXPECT_EQ(f.scheme, Scheme::cc);
    EXPECT_EQ(type_of(f, a), type_of(u, a));
    EXPECT_EQ(f.energy(), e);  // exact, not approximate
  }
  EXPECT_NE(frames[0].symbols, frames[1].symbols);
}

TEST(CcFrames, SeededDeterminism) {
  const CodewordFrame u = base_word(qam(16));
  const auto a = cc_frames(u, 5, 99);
  const auto b = cc_frames(u, 5, 99);
  const auto c = cc_frames(u, 5, 100);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a[i].symbols, b[i].symbols);
  EXPECT_NE(a[0].symbols, c[0].symbols);
}

TEST(CcFrames, FirstPositionIsUniform) {
  const Alphabet a = lowest_energy_subset(qam(256), 171);
  const auto frames = cc_frames(base_word(a), 100000, 5);
  std::vector<std::size_t> counts(a.size(), 0);
  for (const auto& f : frames) ++counts[a.index_of(f.symbols[0])];
  EXPECT_LT(std::abs(chi_square_z(counts)), 3.0);
}

TEST(IudFrames, HistogramAndEnergy) {
  const Alphabet a = qam(64);
  const auto frames = iud_frames(a, 100, 1000, 3);
  std::vector<std::size_t> counts(a.size(), 0);
  double mean = 0.0;
  std::set<double> energies;
  for (const auto& f : frames) {
    EXPECT_EQ(f.scheme, Scheme::iud);
    for (const auto& s : f.symbols) ++counts[a.index_of(s)];
    mean += f.energy();
    energies.insert(f.energy());
  }
  EXPECT_LT(std::abs(chi_square_z(counts)), 3.0);
  mean /= 1000.0;
  // Standard error of the mean frame energy is about sqrt(100 * 0.62 / 1000).
  EXPECT_NEAR(mean, 100.0, 1.0);
  EXPECT_GT(energies.size(), 100u);
}

TEST(Frames, CsvExport) {
  std::ostringstream out;
  write_frame_csv(out, CodewordFrame{{cplx{1.0, -0.5}}, Scheme::cc});
  EXPECT_EQ(out.str(), "j,re,im\n0,1,-0.5\n");
  const auto x = concatenate({CodewordFrame{{cplx{1.0}}, Scheme::cc}, CodewordFrame{{cplx{2.0}, cplx{3.0}}, Scheme::cc}});
  EXPECT_EQ(x, (std::vector<cplx>{1.0, 2.0, 3.0}));
}
