#include "ccnli/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ccnli/error.hpp"

namespace ccnli {
namespace {

constexpr double kPi = std::numbers::pi;

// Fraction of energy allowed outside the extents used by the aliasing guard.
constexpr double kGuardTail = 1e-10;

struct Extent {
  double lo;
  double hi;
};

// Smallest interval [lo, hi] with at most `tail` of the total weight on
// either side. Values are visited in the given order.
template <typename WeightAt, typename PositionAt>
Extent weighted_extent(std::size_t n, WeightAt weight, PositionAt position, double tail) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weight(i);
  if (total <= 0.0) return {position(0), position(0)};
  const double cut = tail * total;
  double acc = 0.0;
  std::size_t lo = 0;
  for (; lo < n; ++lo) {
    acc += weight(lo);
    if (acc > cut) break;
  }
  acc = 0.0;
  std::size_t hi = n - 1;
  for (; hi > 0; --hi) {
    acc += weight(hi);
    if (acc > cut) break;
  }
  return {position(lo), position(std::max(lo, hi))};
}

// Verify that disperse(s(t - t_shift) exp(i 2 pi f_shift t), z) stays inside the grid.
void check_isolated(const SampledSignal& s, const std::vector<cplx>& spectrum, double z,
                    double t_shift, double f_shift) {
  const std::size_t n = s.size();
  const auto& q = s.samples();
  const Extent support = weighted_extent(
      n, [&](std::size_t i) { return std::norm(q[i]); }, [&](std::size_t i) { return s.time(i); },
      kGuardTail);
  // Visit bins in increasing frequency.
  const std::size_t half = n / 2;
  auto ordered = [&](std::size_t r) { return (r + (n - half)) % n; };
  const Extent band = weighted_extent(
      n, [&](std::size_t r) { return std::norm(spectrum[ordered(r)]); },
      [&](std::size_t r) { return bin_frequency(ordered(r), n, s.dt()); }, kGuardTail);

  const double f_lo = band.lo + f_shift;
  const double f_hi = band.hi + f_shift;
  // A component at frequency f is delayed by -4 pi f z.
  const double d1 = -4.0 * kPi * f_lo * z;
  const double d2 = -4.0 * kPi * f_hi * z;
  const double lo = support.lo + t_shift + std::min(d1, d2);
  const double hi = support.hi + t_shift + std::max(d1, d2);
  const double grid_lo = s.t0();
  const double grid_hi = s.t0() + s.duration() - s.dt();
  if (lo < grid_lo || hi > grid_hi) {
    std::ostringstream msg;
    msg << "dispersion over z=" << z << " moves the pulse to [" << lo << ", " << hi
        << "], outside the grid [" << grid_lo << ", " << grid_hi
        << "]; enlarge the window or use Boundary::periodic";
    throw AliasingError(msg.str());
  }
}

}  // namespace

SampledSignal::SampledSignal(std::vector<cplx> samples, double dt, double t0)
    : samples_(std::move(samples)), dt_(dt), t0_(t0) {
  if (samples_.empty()) throw ConfigError("SampledSignal: no samples");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ConfigError("SampledSignal: dt must be positive");
}

double SampledSignal::energy() const {
  double e = 0.0;
  for (const auto& v : samples_) e += std::norm(v);
  return e * dt_;
}

cplx inner_product(const SampledSignal& a, const SampledSignal& b) {
  if (a.size() != b.size()) throw ConfigError("inner_product: grid mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc * a.dt();
}

double relative_l2(const SampledSignal& a, const SampledSignal& b) {
  if (a.size() != b.size()) throw ConfigError("relative_l2: grid mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

NormalizationMap NormalizationMap::from_length_scale(double l0_km, double beta2, double gamma) {
  if (!(l0_km > 0.0)) throw ConfigError("NormalizationMap: L0 must be positive");
  if (!(beta2 < 0.0)) throw ConfigError("NormalizationMap: beta2 must be negative (anomalous)");
  if (!(gamma > 0.0)) throw ConfigError("NormalizationMap: gamma must be positive");
  const double t0 = std::sqrt(std::abs(beta2) * l0_km / 2.0);
  const double p0 = 2.0 / (gamma * l0_km);
  return NormalizationMap(l0_km, t0, p0, beta2, gamma);
}

cplx NormalizationMap::to_normalized_field(cplx sqrt_watt) const noexcept {
  return sqrt_watt / std::sqrt(p0_w_);
}

cplx NormalizationMap::to_physical_field(cplx q) const noexcept { return q * std::sqrt(p0_w_); }

NormalizationMap normalize(const PhysicalParams& p) {
  if (!(p.beta2_s2_per_km < 0.0)) throw ConfigError("normalize: beta2 must be negative");
  if (!(p.gamma_per_w_km > 0.0)) throw ConfigError("normalize: gamma must be positive");
  if (!(p.symbol_interval_s > 0.0)) throw ConfigError("normalize: symbol interval must be positive");
  const double l0 = 2.0 * p.symbol_interval_s * p.symbol_interval_s / std::abs(p.beta2_s2_per_km);
  return NormalizationMap::from_length_scale(l0, p.beta2_s2_per_km, p.gamma_per_w_km);
}

cplx dispersion_transfer(double f, double z) {
  const double w = 2.0 * kPi * f;
  return std::polar(1.0, w * w * z);
}

void apply_dispersion(std::span<cplx> spectrum, double dt, double z) {
  if (z == 0.0) return;
  const std::size_t n = spectrum.size();
  for (std::size_t m = 0; m < n; ++m) spectrum[m] *= dispersion_transfer(bin_frequency(m, n, dt), z);
}

SampledSignal disperse(const SampledSignal& s, double z, Boundary boundary) {
  if (z == 0.0) return s;
  const std::size_t n = s.size();
  Fft fft(n);
  std::vector<cplx> spec(n);
  fft.forward(s.samples(), spec);
  if (boundary == Boundary::isolated) check_isolated(s, spec, z, 0.0, 0.0);
  apply_dispersion(spec, s.dt(), z);
  fft.backward(spec);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : spec) v *= scale;
  return SampledSignal(std::move(spec), s.dt(), s.t0());
}

cplx dispersion_kernel(double z, double t) {
  if (z == 0.0) throw ConfigError("dispersion_kernel: z = 0 is a distribution (delta), not a function");
  const cplx phase = std::polar(1.0, -(t * t / (4.0 * z) - kPi / 4.0));
  const double mag = std::sqrt(4.0 * kPi * std::abs(z));
  // sqrt(z) = i sqrt(|z|) on the negative axis.
  const cplx root = z > 0.0 ? cplx(mag, 0.0) : cplx(0.0, mag);
  return phase / root;
}

SampledSignal disperse_modulated(const SampledSignal& s, double z, double t0, double f0,
                                 Boundary boundary) {
  const std::size_t n = s.size();
  if (boundary == Boundary::periodic) {
    const double bins = f0 * s.duration();
    if (std::abs(bins - std::round(bins)) > 1e-9)
      throw AliasingError("disperse_modulated: f0 is not a whole bin on a periodic grid");
  }
  Fft fft(n);
  std::vector<cplx> spec(n);
  fft.forward(s.samples(), spec);
  if (boundary == Boundary::isolated) check_isolated(s, spec, z, t0, f0);

  // S(t - tau) with tau = t0 - 4 pi f0 z, folded into the same spectral pass.
  const double tau = t0 - 4.0 * kPi * f0 * z;
  for (std::size_t m = 0; m < n; ++m) {
    const double f = bin_frequency(m, n, s.dt());
    spec[m] *= dispersion_transfer(f, z) * std::polar(1.0, -2.0 * kPi * f * tau);
  }
  fft.backward(spec);
  const double scale = 1.0 / static_cast<double>(n);
  const double carrier_phase = 4.0 * kPi * kPi * f0 * f0 * z;
  for (std::size_t i = 0; i < n; ++i)
    spec[i] *= scale * std::polar(1.0, 2.0 * kPi * f0 * s.time(i) + carrier_phase);
  return SampledSignal(std::move(spec), s.dt(), s.t0());
}

}  // namespace ccnli
