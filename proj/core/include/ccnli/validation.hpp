#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "ccnli/config.hpp"

namespace ccnli {

struct ValidationOptions {
  double length_km = 1000.0;
  std::size_t symbols = 512;
  /// Amplitude relative to sqrt(P_launch / P0); replaces cfg.power_multiplier.
  double power_multiplier = 0.25;
  /// Split-step controls; the step error must sit well below the
  /// second-order perturbation at half amplitude.
  double max_step_km = 0.05;
  double max_nonlinear_phase = 1e-4;
  /// Panel width of the first-order field quadrature.
  double max_panel = 0.01;
  std::uint64_t seed = 1;
  double min_correlation = 0.99;
  double min_shrink = 16.0;
};

struct ValidationReport {
  std::size_t n_symbols = 0;
  double amplitude = 0.0;
  /// max |linear chain output - a| / amplitude; exact chain gives rounding only.
  double linear_error = 0.0;
  /// |sum d_sim conj(d_pred)| / (||d_sim|| ||d_pred||) at full amplitude,
  /// d = detected symbol minus the launched one.
  double correlation = 0.0;
  /// RMS of d_sim - d_pred at full and half amplitude.
  double residual_full = 0.0;
  double residual_half = 0.0;
  double shrink = 0.0;
  /// RMS of d_sim at full amplitude, for scale.
  double delta_rms = 0.0;
  bool pass_linear = false;
  bool pass_correlation = false;
  bool pass_shrink = false;

  bool passed() const noexcept { return pass_linear && pass_correlation && pass_shrink; }
};

/// Channel-0 symbols of a lossless WDM link (IUD 64-QAM on every channel,
/// cfg's fiber, plan and pulse) detected by the matched filter, compared
/// against a + epsilon * delta with delta from the first-order field.
ValidationReport validate_model(const ExperimentConfig& cfg, const ValidationOptions& options = {});

std::string to_json(const ValidationReport& r);

}  // namespace ccnli
