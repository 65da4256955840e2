#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ccnli/codebook.hpp"
#include "ccnli/error.hpp"
#include "ccnli/fft.hpp"
#include "ccnli/rng.hpp"
#include "ccnli/wdm.hpp"
#include "oracles.hpp"

using namespace ccnli;

namespace {

WdmPlan small_plan(std::size_t symbols = 128, int m = 2, std::size_t sps = 8) {
  WdmPlan p;
  p.channels_half = m;
  p.symbols = symbols;
  p.samples_per_symbol = sps;
  return p;
}

SymbolFrame random_frame(int m, std::size_t n, std::uint64_t seed) {
  SymbolFrame f(m, n);
  const Alphabet a = qam(64);
  for (int k = -m; k <= m; ++k) {
    const auto x = iud_frames(a, n, 1, derive_seed(seed, {static_cast<std::uint64_t>(k + m)}))[0].symbols;
    for (std::size_t j = 0; j < n; ++j) f.at(k, j) = x[j];
  }
  return f;
}


double max_abs_diff(const std::vector<cplx>& a, std::span<const cplx> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Phase noise: Y = X exp(i theta_j) + w with a random-walk theta.
std::pair<std::vector<cplx>, std::vector<cplx>> noisy_pair(std::size_t n, double step, double sigma,
                                                           std::uint64_t seed) {
  const auto x = iud_frames(qam(16), n, 1, seed)[0].symbols;
  SplitMix64 r(derive_seed(seed, {1}));
  std::vector<cplx> y(n);
  double theta = 0.3;
  for (std::size_t i = 0; i < n; ++i) {
    theta += step * r.normal();
    y[i] = x[i] * std::polar(1.0, theta) + sigma * cplx(r.normal(), r.normal());
  }
  return {x, y};
}

}  // namespace

TEST(Modulate, SingleSymbolIsThePeriodicSinc) {
  const auto plan = small_plan(64, 0);
  SymbolFrame f(0, 64);
  f.at(0, 0) = 1.0;
  const auto s = modulate(f, PulseShape{}, plan);
  // Band-limited to the half-open band [-1/2, 1/2): a Dirichlet-type kernel.
  for (std::size_t i = 0; i < s.size(); i += 3) {
    const double t = s.time(i);
    cplx ref{};
    for (int m = -32; m < 32; ++m) ref += std::polar(1.0, 2 * oracle::kPi * m * t / 64.0);
    ref /= 64.0;
    EXPECT_LT(std::abs(s[i] - ref), 1e-12) << "t = " << t;
  }
  // Close to sin(pi t) / (pi t) near the pulse centre on this period.
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.time(i);
    const double ref = t == 0.0 ? 1.0 : std::sin(oracle::kPi * t) / (oracle::kPi * t);
    if (std::abs(t) < 2.0) {
      EXPECT_NEAR(std::abs(s[i]), std::abs(ref), 0.05);
    }
  }
}

TEST(Modulate, ParsevalAndSpectralSupport) {
  for (PulseShape p : {PulseShape{}, PulseShape{PulseKind::rrc, 0.06}}) {
    auto plan = small_plan(128);
    plan.spacing = p.kind == PulseKind::rrc ? 1.06 : 1.0;
    const auto f = random_frame(2, 128, 4);
    const auto s = modulate(f, p, plan);
    double frame_energy = 0.0;
    for (int k = -2; k <= 2; ++k)
      for (auto a : f.channel(k)) frame_energy += std::norm(a);
    EXPECT_NEAR(s.energy(), frame_energy, 1e-6 * frame_energy);
  }
  // One symbol on channel 1: energy only within one band around f = 1.
  auto plan = small_plan(128, 1);
  SymbolFrame f(1, 128);
  f.at(1, 5) = {0.0, 1.0};
  const auto s = modulate(f, PulseShape{}, plan);
  std::vector<cplx> spec(s.size());
  Fft(s.size()).forward(s.samples(), spec);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const long b = signed_bin(i, spec.size());
    const bool inside = b >= 128 - 64 && b < 128 + 64;
    if (!inside) {
      EXPECT_LT(std::abs(spec[i]), 1e-9) << "bin " << b;
    }
  }
}

TEST(Plan, ValidationAndSnapping) {
  auto plan = small_plan(4104, 2, 8);
  plan.spacing = 50.0 / (50.0 / 1.06);
  // 1.06 * 4104 = 4350.24 bins: snapped up so the guard band never narrows.
  EXPECT_EQ(plan.spacing_bins(), 4351);
  EXPECT_EQ(plan.carrier_bin(-2), -2 * 4351);
  EXPECT_NO_THROW(plan.validate(PulseShape{PulseKind::rrc, 0.06}));
  plan.spacing = 1.0;
  EXPECT_EQ(plan.spacing_bins(), 4104);
  EXPECT_THROW(plan.validate(PulseShape{PulseKind::rrc, 0.06}), ConfigError);
  auto tight = small_plan(128, 2, 4);
  EXPECT_THROW(tight.validate(PulseShape{}), AliasingError);
  EXPECT_THROW(PulseShape({PulseKind::rrc, 0.3}).validate(), ConfigError);
  SymbolFrame wrong(2, 64);
  EXPECT_THROW(modulate(wrong, PulseShape{}, small_plan(128)), ConfigError);
}

TEST(ChannelSelect, SingleChannelUnchangedAndProjection) {
  const auto plan = small_plan(128);
  SymbolFrame one(2, 128);
  const auto r = random_frame(0, 128, 8);
  for (std::size_t j = 0; j < 128; ++j) one.at(0, j) = r.at(0, j);
  const auto s = modulate(one, PulseShape{}, plan);
  EXPECT_LT(relative_l2(channel_select(s, 0, plan), s), 1e-9);

  const auto full = modulate(random_frame(2, 128, 9), PulseShape{}, plan);
  for (int k = -2; k <= 2; ++k) EXPECT_LE(channel_select(full, k, plan).energy(), full.energy() * (1 + 1e-12));
}

TEST(ChannelSelect, MultiplexMatchesSingleChannelTransmission) {
  const auto plan = small_plan(128);
  const auto f = random_frame(2, 128, 10);
  const double z = 3.0;
  const auto rx = disperse(modulate(f, PulseShape{}, plan), z, Boundary::periodic);
  for (int k = -2; k <= 2; ++k) {
    SymbolFrame alone(2, 128);
    for (std::size_t j = 0; j < 128; ++j) alone.at(k, j) = f.at(k, j);
    const auto ref = channel_select(disperse(modulate(alone, PulseShape{}, plan), z, Boundary::periodic), k, plan);
    EXPECT_LT(relative_l2(channel_select(rx, k, plan), ref), 1e-6) << "channel " << k;
  }
}

TEST(MatchedFilter, ExactOnUndispersedAndDispersedSignals) {
  const auto plan = small_plan(128, 0);
  const auto f = random_frame(0, 128, 11);
  const auto s = modulate(f, PulseShape{}, plan);
  EXPECT_LT(max_abs_diff(matched_filter_detect(s, 0.0, PulseShape{}, 128), f.channel(0)), 1e-12);
  const auto d = disperse(s, 40.0, Boundary::periodic);
  EXPECT_LT(max_abs_diff(matched_filter_detect(d, 40.0, PulseShape{}, 128), f.channel(0)), 1e-9);
  EXPECT_THROW(matched_filter_detect(s, 0.0, PulseShape{}, 100), ConfigError);
}

// modulate -> linear propagation -> channel_select -> matched filter.
TEST(Loopback, LinearRecoversEveryChannel) {
  for (PulseShape p : {PulseShape{}, PulseShape{PulseKind::rrc, 0.06}}) {
    auto plan = small_plan(256);
    plan.spacing = p.kind == PulseKind::rrc ? 1.06 : 1.0;
    const auto f = random_frame(2, 256, 12);
    const double z = 54.25;
    const auto rx = disperse(modulate(f, p, plan), z, Boundary::periodic);
    for (int k = -2; k <= 2; ++k) {
      const double fk = plan.carrier_frequency(k);
      EXPECT_LT(max_abs_diff(matched_filter_detect(channel_select(rx, k, plan), z, p, 256, fk), f.channel(k)), 1e-6);
      // Resampled to 4 samples per symbol for back-propagation.
      const auto low = channel_select(rx, k, plan, 4);
      EXPECT_EQ(low.size(), 256u * 4u);
      EXPECT_LT(max_abs_diff(matched_filter_detect(low, z, p, 256, fk), f.channel(k)), 1e-6);
      if (k != 0) {
        EXPECT_GT(max_abs_diff(matched_filter_detect(low, z, p, 256), f.channel(k)), 0.1);
      }
    }
  }
}

TEST(MeanPhase, Examples) {
  const auto x = iud_frames(qam(16), 200, 1, 1)[0].symbols;
  std::vector<cplx> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * std::polar(1.0, 0.7);
  const auto c = mean_phase_correct(x, y);
  EXPECT_LT(max_abs_diff(c, x), 1e-12);

  auto [xn, yn] = noisy_pair(500, 0.01, 0.05, 3);
  const auto cn = mean_phase_correct(xn, yn);
  double mean = 0.0;
  for (std::size_t i = 0; i < xn.size(); ++i) mean += std::arg(cn[i] * std::conj(xn[i]));
  EXPECT_NEAR(mean / xn.size(), 0.0, 1e-12);
  // One common rotation.
  const cplx r0 = cn[0] / yn[0];
  for (std::size_t i = 1; i < xn.size(); ++i) EXPECT_LT(std::abs(cn[i] / yn[i] - r0), 1e-12);
}

TEST(Bps, ConstantRotationAndZeroWindow) {
  const auto x = iud_frames(qam(64), 300, 1, 2)[0].symbols;
  std::vector<cplx> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * std::polar(1.0, -1.1);
  BpsConfig cfg{true, 10};
  EXPECT_LT(max_abs_diff(bps_genie(x, y, cfg), x), 1e-12);

  auto [xn, yn] = noisy_pair(300, 0.05, 0.1, 4);
  BpsConfig zero{true, 0};
  const auto out = bps_genie(xn, yn, zero);
  for (std::size_t i = 0; i < xn.size(); ++i) EXPECT_NEAR(std::arg(out[i] * std::conj(xn[i])), 0.0, 1e-12);

  std::vector<cplx> zeros(5, cplx{});
  EXPECT_EQ(bps_genie(zeros, std::vector<cplx>(5, cplx{1.0, 1.0}), zero), std::vector<cplx>(5, cplx(1.0, 1.0)));
  EXPECT_THROW(bps_genie(x, std::vector<cplx>(3), cfg), ConfigError);
  BpsConfig bad{true, -1};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Bps, RemovesSlowPhaseRamp) {
  const auto x = iud_frames(qam(64), 400, 1, 5)[0].symbols;
  std::vector<cplx> y(x.size());
  const double slope = 2e-3;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * std::polar(1.0, slope * static_cast<double>(i));
  BpsConfig cfg{true, 10};
  const auto out = bps_genie(x, y, cfg);
  // The drift varies by slope * N = 0.02 rad inside a window.
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LT(std::abs(std::arg(out[i] * std::conj(x[i]))), slope * 10) << i;
}

TEST(Bps, GridSearchApproximatesClosedForm) {
  auto [x, y] = noisy_pair(200, 0.02, 0.05, 6);
  BpsConfig exact{true, 10};
  BpsConfig grid{true, 10, true, 64};
  const auto a = bps_genie(x, y, exact);
  const auto b = bps_genie(x, y, grid);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_LE(std::abs(std::remainder(std::arg(a[i] / b[i]), 2 * oracle::kPi)), oracle::kPi / 64 + 1e-12);
}

TEST(Bps, NeverDecreasesSnr) {
  double before = 0.0, after = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto [x, y] = noisy_pair(600, 0.03, 0.05, 100 + seed);
    const auto y0 = mean_phase_correct(x, y);
    const double s0 = snr_estimate(x, y0).snr_db;
    // N = 0 rotates every symbol onto its reference: SNR cannot drop.
    EXPECT_GE(snr_estimate(x, bps_genie(x, y, {true, 0})).snr_db, s0 - 1e-9);
    before += s0;
    after += snr_estimate(x, bps_genie(x, y, {true, 10})).snr_db;
  }
  EXPECT_GE(after / 20, before / 20);
}

TEST(Snr, Examples) {
  const auto x = iud_frames(qam(64), 20000, 1, 7)[0].symbols;
  const auto exact = snr_estimate(x, x);
  EXPECT_EQ(exact.snr_db, kSnrCapDb);
  EXPECT_EQ(exact.n_symbols, 20000 - 2 * kSnrEdgeExclusion);

  SplitMix64 r(8);
  std::vector<cplx> y(x.size());
  // Variance 0.1 split over both quadratures.
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + std::sqrt(0.05) * cplx(r.normal(), r.normal());
  const auto rep = snr_estimate(x, y);
  // Relative error of the pooled noise power is about 1/sqrt(n).
  EXPECT_NEAR(rep.snr_db, 10.0, 10.0 * std::log10(1.0 + 4.0 / std::sqrt(20000.0)) + 0.05);

  std::vector<cplx> xr(x.size()), yr(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xr[i] = x[i] * std::polar(1.0, 2.2);
    yr[i] = y[i] * std::polar(1.0, 2.2);
  }
  EXPECT_NEAR(snr_estimate(xr, yr).snr_db, rep.snr_db, 1e-9);
}

TEST(Snr, AccumulatorPoolsSums) {
  auto [x1, y1] = noisy_pair(300, 0.0, 0.1, 9);
  auto [x2, y2] = noisy_pair(500, 0.0, 0.2, 10);
  SnrAccumulator a, b, both;
  a.add(x1, y1);
  b.add(x2, y2);
  both.add(x1, y1);
  both.add(x2, y2);
  a.merge(b);
  EXPECT_NEAR(a.report().snr_db, both.report().snr_db, 1e-12);
  EXPECT_EQ(a.report().n_symbols, (300 + 500) - 4 * kSnrEdgeExclusion);
}

TEST(SymbolsCsv, Header) {
  std::ostringstream out;
  const std::vector<cplx> x{{1.0, 0.0}}, y{{0.5, -0.25}};
  write_symbols_csv(out, x, y);
  EXPECT_EQ(out.str(), "j,re_x,im_x,re_y,im_y\n0,1,0,0.5,-0.25\n");
}
