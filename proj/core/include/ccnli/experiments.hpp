#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccnli/config.hpp"

namespace ccnli {

/// One row per (length, scheme, detection, bps) cell, pooled over trials.
struct ResultRow {
  double length_km = 0.0;
  std::string scheme;
  std::string detection;
  std::string bps;
  double snr_db = 0.0;
  std::size_t n_symbols = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// A propagation unit (one scheme, one trial) that raised instead of finishing.
struct RunFailure {
  std::string scheme;
  std::size_t trial = 0;
  std::string kind;
  std::string message;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<RunFailure> failures;
  /// Total split-step steps over every forward propagation.
  std::size_t forward_steps = 0;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Worker count from CCNLI_WORKERS, else the hardware concurrency (>= 1).
unsigned worker_count_from_env();

/// Every (scheme, trial) unit launches its own symbols, propagates once with
/// taps at every sweep length and runs each detection and BPS arm on the
/// taps. Symbols of unit (s, t), channel k use the seed
/// derive_seed(seed, {t, s, k + M}); ASE uses derive_seed(seed, {t, s, 1 << 20}).
/// Units run on `workers` threads (0: worker_count_from_env()); the rows do
/// not depend on the worker count or scheduling. A failing unit is recorded
/// and the sweep continues; its cells pool only the remaining trials.
SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {},
                      unsigned workers = 0);

/// CSV header `length_km,scheme,detection,bps,snr_db,n_symbols,trials,seed`.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// JSON manifest: resolved config, derived normalization, substituted
/// defaults for physical and numerical choices, failures.
std::string run_manifest(const ExperimentConfig& cfg, const SweepResult* result = nullptr);

/// chi_{k,j} at lengths_km.start for |k| <= channels_half and
/// |j| <= chi_j_max. CSV header `k,j,re_chi,im_chi,im_chi_mirror` where the
/// mirror column is chi_{-k,-j}. Requires spacing equal to the symbol rate.
void emit_chi_table(const ExperimentConfig& cfg, std::ostream& out, unsigned workers = 0);

/// CSV header `m,cc_rate,iud_rate,gap` for m = 1..m_max: all-ones CC rate
/// over an m-point alphabet, log2 m, and their difference.
void emit_rate_curve(std::size_t m_max, std::ostream& out);

}  // namespace ccnli
