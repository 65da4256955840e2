#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ccnli/field.hpp"
#include "ccnli/symbol_frame.hpp"

namespace ccnli {

enum class PulseKind { sinc, rrc };

/// Unit-energy Nyquist pulse for a unit symbol interval.
struct PulseShape {
  PulseKind kind = PulseKind::sinc;
  /// Roll-off of the root-raised-cosine pulse, in [0, 0.25].
  double rolloff = 0.0;

  void validate() const;
  /// Fourier transform P(f). The sinc band is half-open, [-1/2, 1/2), so
  /// adjacent channels at unit spacing never share a frequency bin.
  double spectrum(double f) const;
  /// Largest |f| with P(f) != 0.
  double half_bandwidth() const;
};

/// Periodic WDM grid: `symbols` symbol slots per channel, one period of
/// `symbols` time units, `samples_per_symbol` samples per unit. Carrier k sits
/// on bin k * spacing_bins(): the spacing is snapped to the frequency
/// resolution 1/symbols, to the nearest bin that is not narrower than asked.
struct WdmPlan {
  int channels_half = 2;
  double spacing = 1.0;
  std::size_t symbols = 2052;
  std::size_t samples_per_symbol = 16;

  void validate(const PulseShape& pulse) const;
  std::size_t grid_size() const noexcept { return symbols * samples_per_symbol; }
  double dt() const noexcept { return 1.0 / static_cast<double>(samples_per_symbol); }
  /// Whole bins between neighbouring carriers.
  long spacing_bins() const;
  long carrier_bin(int k) const;
  double carrier_frequency(int k) const;
  /// Spacing actually realized on the grid.
  double effective_spacing() const;
};

/// q(0,t) = sum_k sum_j a_{k,j} p(t - j) exp(i 2 pi f_k t), built exactly in
/// the frequency domain as one period of the periodic multiplex.
SampledSignal modulate(const SymbolFrame& frame, const PulseShape& pulse, const WdmPlan& plan);

/// Ideal brick-wall filter one spacing wide around carrier k (half-open
/// [f_k - B/2, f_k + B/2)), shifted to baseband and resampled to
/// `samples_per_symbol_out` samples per symbol (0 keeps the input rate).
SampledSignal channel_select(const SampledSignal& s, int k, const WdmPlan& plan,
                             std::size_t samples_per_symbol_out = 0);

/// Matched filter against the pulse dispersed over z_effective, sampled at
/// every symbol slot j = 0..symbols-1 of a baseband periodic signal holding
/// `symbols` slots. Undoes dispersion, multiplies by conj(P), folds the
/// spectrum to the symbol rate and inverts. `carrier` is the offset f_k the
/// channel had before channel_select: baseband bin f travelled at f + f_k, so
/// its dispersion (including the walk-off of channel k) is undone there.
std::vector<cplx> matched_filter_detect(const SampledSignal& s, double z_effective,
                                        const PulseShape& pulse, std::size_t symbols,
                                        double carrier = 0.0);

/// Y rotated by one common angle so that the mean of arg(Y_i conj(X_i)) is 0.
/// Pairs with a zero symbol do not contribute to the mean.
std::vector<cplx> mean_phase_correct(std::span<const cplx> x, std::span<const cplx> y);

struct BpsConfig {
  bool enabled = false;
  /// Window 2N+1 symbols, truncated at the sequence ends.
  int half_window = 10;
  /// Search a grid of test phases instead of the closed-form minimizer.
  bool grid_search = false;
  int test_phases = 64;

  void validate() const;
  int window() const noexcept { return 2 * half_window + 1; }
};

/// Genie-aided phase search: Y_j exp(i phi_j) with phi_j minimizing
/// sum_{|i-j|<=N} |X_i - Y_i exp(i phi)|^2. Closed form
/// phi_j = arg sum X_i conj(Y_i); an all-zero window leaves Y_j unrotated.
std::vector<cplx> bps_genie(std::span<const cplx> x, std::span<const cplx> y, const BpsConfig& cfg);

/// Effective SNR E|X|^2 / E|Y - X|^2 pooled over every added sequence.
struct SnrReport {
  double snr_db = 0.0;
  std::size_t n_symbols = 0;
  double signal_power = 0.0;
  double noise_power = 0.0;
  std::string scheme;
  std::string detection;
  std::string bps;
  double length_km = 0.0;
  std::uint64_t seed = 0;
};

/// Ratio above which the SNR is reported as the cap.
inline constexpr double kSnrCapDb = 120.0;
/// Symbols dropped at each end of a sequence before averaging.
inline constexpr std::size_t kSnrEdgeExclusion = 32;

class SnrAccumulator {
 public:
  explicit SnrAccumulator(std::size_t edge_exclusion = kSnrEdgeExclusion)
      : edge_(edge_exclusion) {}
  void add(std::span<const cplx> x, std::span<const cplx> y);
  /// Pool another accumulator's sums into this one.
  void merge(const SnrAccumulator& other);
  SnrReport report() const;

 private:
  std::size_t edge_;
  double signal_ = 0.0;
  double noise_ = 0.0;
  std::size_t count_ = 0;
};

/// Single-sequence estimate with the default edge exclusion.
SnrReport snr_estimate(std::span<const cplx> x, std::span<const cplx> y,
                       std::size_t edge_exclusion = kSnrEdgeExclusion);

/// CSV with header `j,re_x,im_x,re_y,im_y`.
void write_symbols_csv(std::ostream& out, std::span<const cplx> x, std::span<const cplx> y);

}  // namespace ccnli
