#include "ccnli/wdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ccnli/csv.hpp"
#include "ccnli/error.hpp"

namespace ccnli {
namespace {

constexpr double kPi = std::numbers::pi;

// Smallest and largest signed bin of channel k's pulse band.
std::pair<long, long> band_bins(const PulseShape& pulse, const WdmPlan& plan, int k) {
  const auto n = static_cast<long>(plan.symbols);
  const long c = plan.carrier_bin(k);
  if (pulse.kind == PulseKind::sinc || pulse.rolloff == 0.0) {
    // [-1/2, 1/2) on a grid with spacing 1/N.
    return {c - n / 2, c + (n - 1) / 2};
  }
  const auto h = static_cast<long>(std::floor(pulse.half_bandwidth() * static_cast<double>(n)));
  return {c - h, c + h};
}

std::size_t checked_symbols(const SampledSignal& s, std::size_t symbols) {
  if (symbols == 0) throw ConfigError("symbol count must be positive");
  if (s.size() % symbols != 0)
    throw ConfigError("signal length is not a whole number of samples per symbol");
  if (std::abs(s.duration() - static_cast<double>(symbols)) > 1e-9 * static_cast<double>(symbols))
    throw ConfigError("signal duration does not match the symbol count");
  return s.size() / symbols;
}

}  // namespace

void PulseShape::validate() const {
  if (kind == PulseKind::rrc && !(rolloff >= 0.0 && rolloff <= 0.25))
    throw ConfigError("pulse: rolloff must be in [0, 0.25]");
}

double PulseShape::half_bandwidth() const {
  return kind == PulseKind::sinc ? 0.5 : 0.5 * (1.0 + rolloff);
}

double PulseShape::spectrum(double f) const {
  if (kind == PulseKind::sinc || rolloff == 0.0) return (f >= -0.5 && f < 0.5) ? 1.0 : 0.0;
  const double af = std::abs(f);
  const double lo = 0.5 * (1.0 - rolloff);
  const double hi = 0.5 * (1.0 + rolloff);
  if (af <= lo) return 1.0;
  if (af >= hi) return 0.0;
  return std::cos(kPi / (2.0 * rolloff) * (af - lo));
}

long WdmPlan::spacing_bins() const {
  const double x = spacing * static_cast<double>(symbols);
  long b = std::lround(x);
  // Rounding down would narrow the guard band; only rounding noise is allowed.
  if (static_cast<double>(b) < x * (1.0 - 1e-12)) ++b;
  return b;
}

long WdmPlan::carrier_bin(int k) const { return static_cast<long>(k) * spacing_bins(); }

double WdmPlan::carrier_frequency(int k) const {
  return static_cast<double>(carrier_bin(k)) / static_cast<double>(symbols);
}

double WdmPlan::effective_spacing() const {
  return static_cast<double>(spacing_bins()) / static_cast<double>(symbols);
}

void WdmPlan::validate(const PulseShape& pulse) const {
  pulse.validate();
  if (channels_half < 0) throw ConfigError("plan: channels_half must be non-negative");
  if (symbols == 0) throw ConfigError("plan: symbols must be positive");
  if (samples_per_symbol == 0) throw ConfigError("plan: samples_per_symbol must be positive");
  if (!(spacing > 0.0)) throw ConfigError("plan: spacing must be positive");
  for (int k = -channels_half; k < channels_half; ++k)
    if (band_bins(pulse, *this, k).second >= band_bins(pulse, *this, k + 1).first)
      throw ConfigError("plan: channel spectra overlap; increase the spacing");
  const auto n = static_cast<long>(grid_size());
  const auto lo = band_bins(pulse, *this, -channels_half).first;
  const auto hi = band_bins(pulse, *this, channels_half).second;
  if (lo < -n / 2 || hi > (n - 1) / 2)
    throw AliasingError("plan: the multiplex does not fit below the Nyquist frequency; raise samples_per_symbol");
}

SampledSignal modulate(const SymbolFrame& frame, const PulseShape& pulse, const WdmPlan& plan) {
  plan.validate(pulse);
  if (frame.length() != plan.symbols) throw ConfigError("modulate: frame length differs from the plan");
  if (frame.channels_half() != plan.channels_half)
    throw ConfigError("modulate: frame channel count differs from the plan");
  const std::size_t nsym = plan.symbols;
  const std::size_t n = plan.grid_size();
  const double inv_nsym = 1.0 / static_cast<double>(nsym);
  Fft sym_fft(nsym);
  std::vector<cplx> a(nsym);
  std::vector<cplx> spec(n);
  for (int k = -plan.channels_half; k <= plan.channels_half; ++k) {
    const auto ch = frame.channel(k);
    std::copy(ch.begin(), ch.end(), a.begin());
    sym_fft.forward(a);
    const long c = plan.carrier_bin(k);
    const auto [lo, hi] = band_bins(pulse, plan, k);
    for (long b = lo; b <= hi; ++b) {
      const double p = pulse.spectrum(static_cast<double>(b - c) * inv_nsym);
      if (p == 0.0) continue;
      spec[bin_index(b, n)] += inv_nsym * p * a[bin_index(b - c, nsym)];
    }
  }
  Fft fft(n);
  fft.backward(spec);
  return SampledSignal(std::move(spec), plan.dt(), 0.0);
}

SampledSignal channel_select(const SampledSignal& s, int k, const WdmPlan& plan,
                             std::size_t samples_per_symbol_out) {
  const std::size_t sps_in = checked_symbols(s, plan.symbols);
  const std::size_t sps_out = samples_per_symbol_out == 0 ? sps_in : samples_per_symbol_out;
  const std::size_t n_in = s.size();
  const std::size_t n_out = plan.symbols * sps_out;
  const auto width = static_cast<double>(plan.symbols) * plan.effective_spacing();
  // Half-open band [-B/2, B/2) in bins relative to the carrier.
  const auto lo = static_cast<long>(std::ceil(-0.5 * width));
  const auto hi = static_cast<long>(std::ceil(0.5 * width)) - 1;
  if (lo < -static_cast<long>(n_out / 2) || hi >= static_cast<long>((n_out + 1) / 2))
    throw AliasingError("channel_select: output rate too low for one channel spacing");
  Fft fin(n_in);
  std::vector<cplx> spec(n_in);
  fin.forward(s.samples(), spec);
  std::vector<cplx> out(n_out);
  const long c = plan.carrier_bin(k);
  const double scale = static_cast<double>(n_out) / static_cast<double>(n_in);
  for (long r = lo; r <= hi; ++r) out[bin_index(r, n_out)] = scale * spec[bin_index(c + r, n_in)];
  Fft fout(n_out);
  fout.backward(out);
  const double inv = 1.0 / static_cast<double>(n_out);
  for (auto& v : out) v *= inv;
  return SampledSignal(std::move(out), 1.0 / static_cast<double>(sps_out), s.t0());
}

std::vector<cplx> matched_filter_detect(const SampledSignal& s, double z_effective,
                                        const PulseShape& pulse, std::size_t symbols,
                                        double carrier) {
  pulse.validate();
  checked_symbols(s, symbols);
  const std::size_t n = s.size();
  Fft fft(n);
  std::vector<cplx> spec(n);
  fft.forward(s.samples(), spec);
  std::vector<cplx> folded(symbols);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_nsym = 1.0 / static_cast<double>(symbols);
  for (std::size_t m = 0; m < n; ++m) {
    const long b = signed_bin(m, n);
    const double f = static_cast<double>(b) * inv_nsym;
    const double p = pulse.spectrum(f);
    if (p == 0.0) continue;
    folded[bin_index(b, symbols)] += spec[m] * inv_n * p * dispersion_transfer(f + carrier, -z_effective);
  }
  Fft sym(symbols);
  sym.backward(folded);
  return folded;
}

std::vector<cplx> mean_phase_correct(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw ConfigError("mean_phase_correct: length mismatch");
  // Residual phases are averaged relative to a reference rotation so that a
  // large common phase does not wrap across +-pi.
  cplx corr{};
  for (std::size_t i = 0; i < x.size(); ++i) corr += y[i] * std::conj(x[i]);
  const double ref = corr == cplx{} ? 0.0 : std::arg(corr);
  const cplx unref = std::polar(1.0, -ref);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cplx r = y[i] * std::conj(x[i]);
    if (r == cplx{}) continue;
    sum += std::arg(r * unref);
    ++count;
  }
  const double theta = count > 0 ? -(ref + sum / static_cast<double>(count)) : 0.0;
  const cplx rot = std::polar(1.0, theta);
  std::vector<cplx> out(y.begin(), y.end());
  for (auto& v : out) v *= rot;
  return out;
}

void BpsConfig::validate() const {
  if (half_window < 0) throw ConfigError("bps: half_window must be non-negative");
  if (grid_search && test_phases < 1) throw ConfigError("bps: test_phases must be positive");
}

std::vector<cplx> bps_genie(std::span<const cplx> x, std::span<const cplx> y, const BpsConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size()) throw ConfigError("bps_genie: length mismatch");
  const long n = static_cast<long>(x.size());
  const long w = cfg.half_window;
  std::vector<cplx> out(y.begin(), y.end());
  for (long j = 0; j < n; ++j) {
    const long lo = std::max(0L, j - w);
    const long hi = std::min(n - 1, j + w);
    cplx corr{};
    for (long i = lo; i <= hi; ++i) corr += x[static_cast<std::size_t>(i)] * std::conj(y[static_cast<std::size_t>(i)]);
    double phi = 0.0;
    if (!cfg.grid_search) {
      if (corr != cplx{}) phi = std::arg(corr);
    } else {
      // sum |X - Y e^{i theta}|^2 = const - 2 Re(corr e^{-i theta}) on a uniform grid over [-pi, pi).
      double best = -1.0;
      for (int b = 0; b < cfg.test_phases; ++b) {
        const double theta = -kPi + 2.0 * kPi * b / cfg.test_phases;
        const double score = std::real(corr * std::polar(1.0, -theta));
        if (b == 0 || score > best) {
          best = score;
          phi = theta;
        }
      }
    }
    out[static_cast<std::size_t>(j)] *= std::polar(1.0, phi);
  }
  return out;
}

void SnrAccumulator::add(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw ConfigError("snr: length mismatch");
  if (x.size() <= 2 * edge_) return;
  for (std::size_t i = edge_; i + edge_ < x.size(); ++i) {
    signal_ += std::norm(x[i]);
    noise_ += std::norm(y[i] - x[i]);
    ++count_;
  }
}

void SnrAccumulator::merge(const SnrAccumulator& other) {
  signal_ += other.signal_;
  noise_ += other.noise_;
  count_ += other.count_;
}

SnrReport SnrAccumulator::report() const {
  SnrReport r;
  r.n_symbols = count_;
  if (count_ == 0) return r;
  r.signal_power = signal_ / static_cast<double>(count_);
  r.noise_power = noise_ / static_cast<double>(count_);
  if (r.noise_power <= 1e-12 * r.signal_power)
    r.snr_db = kSnrCapDb;
  else
    r.snr_db = std::min(kSnrCapDb, 10.0 * std::log10(r.signal_power / r.noise_power));
  return r;
}

SnrReport snr_estimate(std::span<const cplx> x, std::span<const cplx> y, std::size_t edge_exclusion) {
  SnrAccumulator acc(edge_exclusion);
  acc.add(x, y);
  return acc.report();
}

void write_symbols_csv(std::ostream& out, std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw ConfigError("write_symbols_csv: length mismatch");
  out << "j,re_x,im_x,re_y,im_y\n";
  for (std::size_t j = 0; j < x.size(); ++j)
    out << j << ',' << format_double(x[j].real()) << ',' << format_double(x[j].imag()) << ','
        << format_double(y[j].real()) << ',' << format_double(y[j].imag()) << '\n';
}

}  // namespace ccnli
