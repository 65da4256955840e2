#include "ccnli/ssfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "ccnli/error.hpp"
#include "ccnli/rng.hpp"

namespace ccnli {
namespace {

constexpr double kPlanck = 6.62607015e-34;  // J s
// Positions closer than this (km) are the same point on the link.
constexpr double kPositionTolerance = 1e-9;
constexpr std::size_t kFactorCacheSize = 8;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Power attenuation per unit normalized distance.
double alpha_normalized(const LinkSpec& link) {
  return link.loss_db_per_km * std::log(10.0) / 10.0 * link.map.l0_km();
}

double peak_power(const std::vector<cplx>& q) {
  double p = 0.0;
  for (const auto& v : q) p = std::max(p, std::norm(v));
  return p;
}

class Stepper {
 public:
  Stepper(const SampledSignal& s, const LinkSpec& link, const StepPolicy& policy, int direction,
          PropagationStats* stats)
      : n_(s.size()),
        dt_(s.dt()),
        link_(link),
        policy_(policy),
        direction_(direction),
        alpha_(alpha_normalized(link)),
        fft_(n_),
        spectrum_(n_),
        omega2_(n_),
        stats_(stats) {
    for (std::size_t m = 0; m < n_; ++m) {
      const double w = 2.0 * std::numbers::pi * bin_frequency(m, n_, dt_);
      omega2_[m] = w * w;
    }
  }

  // Advance q (time domain in and out) over `length_km` with no event inside.
  // `position_km` is only used for diagnostics.
  void segment(std::vector<cplx>& q, double length_km, double position_km) {
    if (length_km <= kPositionTolerance) return;
    const double l0 = link_.map.l0_km();
    const double inv_n = 1.0 / static_cast<double>(n_);
    fft_.forward(q, spectrum_);
    double pending = 0.0;  // normalized dispersion not yet applied to spectrum_
    double peak = peak_power(q);
    double done = 0.0;
    while (length_km - done > kPositionTolerance) {
      const double remaining = length_km - done;
      double h_km = std::min(policy_.max_step_km, remaining);
      if (peak > 0.0) {
        // Loss shrinks the effective length forward and stretches it backward;
        // bound the backward case by the worst growth over one maximal step.
        const double growth = direction_ < 0 ? std::exp(alpha_ * policy_.max_step_km / l0) : 1.0;
        const double h_phase = policy_.max_nonlinear_phase / (2.0 * peak * growth) * l0;
        if (h_phase < policy_.min_step_km && h_phase < remaining) {
          std::ostringstream msg;
          msg << "step control: required step " << h_phase << " km is below the minimum "
              << policy_.min_step_km << " km at " << position_km + done
              << " km (peak power " << peak << " normalized)";
          throw NumericalError(msg.str(), h_phase);
        }
        // Largest max_step / 2^L within the bound; repeated step sizes let
        // the dispersion factors be reused.
        double h_level = policy_.max_step_km;
        while (h_level > h_phase && h_level > policy_.min_step_km) h_level *= 0.5;
        h_km = std::min(h_km, h_level);
      }
      // Avoid a sliver step at the end of the segment.
      if (remaining - h_km < 1e-3 * h_km) h_km = remaining;
      const double h = h_km / l0;

      dispersion(pending + 0.5 * h);
      fft_.backward(spectrum_, q);
      for (auto& v : q) v *= inv_n;
      nonlinear(q, h);
      peak = peak_power(q);
      fft_.forward(q, spectrum_);
      pending = 0.5 * h;

      done += h_km;
      if (stats_ != nullptr) {
        if (stats_->steps == 0 || h_km < stats_->smallest_step_km) stats_->smallest_step_km = h_km;
        stats_->largest_step_km = std::max(stats_->largest_step_km, h_km);
        ++stats_->steps;
      }
    }
    dispersion(pending);
    fft_.backward(spectrum_, q);
    for (auto& v : q) v *= inv_n;
  }

 private:
  void dispersion(double z) {
    if (z == 0.0) return;
    const auto& factor = dispersion_factor(direction_ * z);
    for (std::size_t m = 0; m < n_; ++m) spectrum_[m] *= factor[m];
  }

  const std::vector<cplx>& dispersion_factor(double z) {
    auto it = factors_.find(z);
    if (it != factors_.end()) return it->second;
    if (factors_.size() >= kFactorCacheSize) factors_.clear();
    std::vector<cplx> f(n_);
    for (std::size_t m = 0; m < n_; ++m) f[m] = std::polar(1.0, omega2_[m] * z);
    return factors_.emplace(z, std::move(f)).first->second;
  }

  // Forward: q -> q exp(-alpha h/2) exp(-2i |q|^2 Leff), Leff = (1 - e^{-alpha h})/alpha.
  // Backward: the exact inverse of that map.
  void nonlinear(std::vector<cplx>& q, double h) const {
    const double ah = alpha_ * h;
    if (direction_ > 0) {
      const double leff = ah > 1e-12 ? -std::expm1(-ah) / alpha_ : h;
      const double amp = std::exp(-0.5 * ah);
      for (auto& v : q) v *= amp * std::polar(1.0, -2.0 * std::norm(v) * leff);
    } else {
      const double amp = std::exp(0.5 * ah);
      const double leff = ah > 1e-12 ? std::expm1(ah) / alpha_ : h;
      for (auto& v : q) v *= amp * std::polar(1.0, 2.0 * std::norm(v) * leff);
    }
  }

  std::size_t n_;
  double dt_;
  const LinkSpec& link_;
  const StepPolicy& policy_;
  int direction_;
  double alpha_;
  Fft fft_;
  std::vector<cplx> spectrum_;
  std::vector<double> omega2_;
  std::map<double, std::vector<cplx>> factors_;
  PropagationStats* stats_;
};

}  // namespace

void LinkSpec::validate() const {
  if (!(total_length_km >= 0.0) || !std::isfinite(total_length_km))
    throw ConfigError("link: total_length_km must be non-negative");
  if (!(loss_db_per_km >= 0.0)) throw ConfigError("link: loss_db_per_km must be non-negative");
  if (!(carrier_frequency_hz > 0.0)) throw ConfigError("link: carrier_frequency_hz must be positive");
  if (amp == Amplification::edfa) {
    if (!(span_length_km > 0.0)) throw ConfigError("link: span_length_km must be positive");
    const double spans = total_length_km / span_length_km;
    if (std::abs(spans - std::round(spans)) > 1e-9)
      throw ConfigError("link: span_length_km must divide total_length_km");
    if (ase && !(effective_gain_db() > 0.0))
      throw ConfigError("link: ASE requires a positive amplifier gain");
  } else if (ase) {
    throw ConfigError("link: ASE requires amp = edfa");
  }
}

std::size_t LinkSpec::span_count() const {
  if (amp == Amplification::none) return 1;
  return static_cast<std::size_t>(std::llround(total_length_km / span_length_km));
}

double LinkSpec::effective_gain_db() const {
  return gain_db >= 0.0 ? gain_db : loss_db_per_km * span_length_km;
}

void StepPolicy::validate() const {
  if (!(max_nonlinear_phase > 0.0 && max_nonlinear_phase <= 0.1))
    throw ConfigError("step policy: max_nonlinear_phase must be in (0, 0.1]");
  if (!(min_step_km > 0.0)) throw ConfigError("step policy: min_step_km must be positive");
  if (!(max_step_km >= min_step_km)) throw ConfigError("step policy: max_step_km < min_step_km");
}

double ase_variance(const LinkSpec& link, double dt) {
  const double g = db_to_linear(link.effective_gain_db());
  if (!(g > 1.0)) return 0.0;
  const double nf = db_to_linear(link.noise_figure_db);
  const double nsp = nf * g / (2.0 * (g - 1.0));
  const double bandwidth_hz = 1.0 / (dt * link.map.t0_s());
  const double watts = nsp * kPlanck * link.carrier_frequency_hz * (g - 1.0) * bandwidth_hz;
  return link.map.to_normalized_power(watts);
}

std::vector<SampledSignal> propagate_taps(const SampledSignal& s, const LinkSpec& link,
                                          const StepPolicy& policy,
                                          const std::vector<double>& taps_km, std::uint64_t seed,
                                          PropagationStats* stats) {
  link.validate();
  policy.validate();
  for (std::size_t i = 0; i < taps_km.size(); ++i) {
    if (!(taps_km[i] >= 0.0) || taps_km[i] > link.total_length_km + kPositionTolerance)
      throw ConfigError("propagate: tap outside the link");
    if (i > 0 && !(taps_km[i] > taps_km[i - 1])) throw ConfigError("propagate: taps must ascend");
    if (link.amp == Amplification::edfa) {
      const double spans = taps_km[i] / link.span_length_km;
      if (std::abs(spans - std::round(spans)) > 1e-9)
        throw ConfigError("propagate: taps of an amplified link must sit on span ends");
    }
  }
  if (stats != nullptr) *stats = PropagationStats{};

  // Event positions: span ends (amplified) and taps.
  std::vector<double> events(taps_km);
  const std::size_t spans = link.span_count();
  if (link.amp == Amplification::edfa)
    for (std::size_t i = 1; i <= spans; ++i) events.push_back(static_cast<double>(i) * link.span_length_km);
  const double end = taps_km.empty() ? link.total_length_km : taps_km.back();
  events.push_back(end);
  std::sort(events.begin(), events.end());

  const double gain_amp = std::sqrt(db_to_linear(link.effective_gain_db()));
  const double sigma = link.ase ? std::sqrt(ase_variance(link, s.dt()) / 2.0) : 0.0;
  SplitMix64 rng(seed);

  Stepper stepper(s, link, policy, +1, stats);
  std::vector<cplx> q = s.samples();
  std::vector<SampledSignal> out;
  out.reserve(taps_km.size());
  std::size_t next_tap = 0;
  double position = 0.0;
  double last_amp = 0.0;
  for (const double e : events) {
    if (e > end + kPositionTolerance) break;
    stepper.segment(q, e - position, position);
    position = std::max(position, e);
    if (link.amp == Amplification::edfa && position - last_amp > kPositionTolerance) {
      const double spans_here = position / link.span_length_km;
      if (std::abs(spans_here - std::round(spans_here)) <= 1e-9) {
        for (auto& v : q) v *= gain_amp;
        if (sigma > 0.0)
          for (auto& v : q) v += cplx(sigma * rng.normal(), sigma * rng.normal());
        last_amp = position;
        if (stats != nullptr) ++stats->amplifiers;
      }
    }
    while (next_tap < taps_km.size() && std::abs(taps_km[next_tap] - position) <= kPositionTolerance) {
      out.emplace_back(q, s.dt(), s.t0());
      ++next_tap;
    }
  }
  return out;
}

SampledSignal propagate(const SampledSignal& s, const LinkSpec& link, const StepPolicy& policy,
                        std::uint64_t seed, PropagationStats* stats) {
  link.validate();
  if (link.total_length_km <= kPositionTolerance) return s;
  auto out = propagate_taps(s, link, policy, {link.total_length_km}, seed, stats);
  return std::move(out.front());
}

SampledSignal back_propagate(const SampledSignal& s, const LinkSpec& link,
                             const StepPolicy& policy, PropagationStats* stats) {
  link.validate();
  policy.validate();
  if (stats != nullptr) *stats = PropagationStats{};
  std::vector<cplx> q = s.samples();
  if (link.total_length_km <= kPositionTolerance) return s;
  Stepper stepper(s, link, policy, -1, stats);
  if (link.amp == Amplification::none) {
    stepper.segment(q, link.total_length_km, link.total_length_km);
  } else {
    const double inv_gain = 1.0 / std::sqrt(db_to_linear(link.effective_gain_db()));
    for (std::size_t i = link.span_count(); i > 0; --i) {
      for (auto& v : q) v *= inv_gain;
      if (stats != nullptr) ++stats->amplifiers;
      stepper.segment(q, link.span_length_km, static_cast<double>(i) * link.span_length_km);
    }
  }
  return SampledSignal(std::move(q), s.dt(), s.t0());
}

}  // namespace ccnli
