#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccnli/field.hpp"

namespace ccnli {

/// Lumped amplification at the end of every span.
enum class Amplification { none, edfa };

/// Fiber link in physical units; the normalization map converts to the
/// solver's coordinates.
struct LinkSpec {
  NormalizationMap map = normalize(PhysicalParams{});
  double total_length_km = 0.0;
  /// Span length for amplified links; ignored when amp == none.
  double span_length_km = 50.0;
  /// Power attenuation (dB/km); 0 for an idealized link.
  double loss_db_per_km = 0.0;
  Amplification amp = Amplification::none;
  /// EDFA gain; a negative value means "exactly compensate the span loss".
  double gain_db = -1.0;
  double noise_figure_db = 5.0;
  bool ase = false;
  /// Optical carrier for the photon energy h nu of the ASE model.
  double carrier_frequency_hz = 193.4e12;

  /// Throws ConfigError when the link is inconsistent.
  void validate() const;
  /// Number of spans (1 for an unamplified link).
  std::size_t span_count() const;
  /// Gain actually applied per amplifier, in dB.
  double effective_gain_db() const;
};

/// Adaptive step control: each step is the largest max_step_km / 2^L whose
/// peak nonlinear phase stays within max_nonlinear_phase. Steps are also cut
/// at span ends, taps and the link end.
struct StepPolicy {
  double max_nonlinear_phase = 2e-3;
  double min_step_km = 1e-6;
  double max_step_km = 1.0;

  void validate() const;
};

/// Diagnostics of one propagation.
struct PropagationStats {
  std::size_t steps = 0;
  std::size_t amplifiers = 0;
  double smallest_step_km = 0.0;
  double largest_step_km = 0.0;
};

/// ASE variance per complex sample for one amplifier, in normalized power
/// units: n_sp h nu (G - 1) B / P0 with n_sp = NF G / (2 (G - 1)) and B the
/// simulation bandwidth 1 / (dt T0).
double ase_variance(const LinkSpec& link, double dt);

/// Symmetric split-step solution of dq/dz = -i q_tt - 2i |q|^2 q - (alpha/2) q
/// on the signal's periodic grid. Attenuation is integrated exactly inside the
/// nonlinear step; EDFAs act at span ends and add circular Gaussian ASE drawn
/// from a SplitMix64 stream seeded with `seed` when link.ase is set.
SampledSignal propagate(const SampledSignal& s, const LinkSpec& link, const StepPolicy& policy,
                        std::uint64_t seed = 0, PropagationStats* stats = nullptr);

/// One propagation observed at several distances (ascending, each <= the
/// link length and on a span boundary for amplified links). The returned
/// fields match separate propagate() calls to the same distances.
std::vector<SampledSignal> propagate_taps(const SampledSignal& s, const LinkSpec& link,
                                          const StepPolicy& policy,
                                          const std::vector<double>& taps_km,
                                          std::uint64_t seed = 0,
                                          PropagationStats* stats = nullptr);

/// Digital back-propagation: spans in reverse order, every step the exact
/// inverse of the forward step (negated dispersion and nonlinearity, loss
/// turned into gain), amplifier gains inverted, no ASE.
SampledSignal back_propagate(const SampledSignal& s, const LinkSpec& link,
                             const StepPolicy& policy, PropagationStats* stats = nullptr);

}  // namespace ccnli
