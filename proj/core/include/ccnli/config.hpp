#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccnli/codebook.hpp"
#include "ccnli/field.hpp"
#include "ccnli/ssfm.hpp"
#include "ccnli/wdm.hpp"

namespace ccnli {

enum class ScenarioKind { idealized, realistic };
enum class Detection { mf, bp_mf };

std::string_view to_string(ScenarioKind s);
std::string_view to_string(Detection d);

/// Symbol source of one sweep arm.
struct SchemeSpec {
  Scheme kind = Scheme::iud;
  /// cc: the `alphabet_size` least-energy points of square `base_qam`-QAM,
  /// each used once per codeword (blocklength = alphabet_size).
  std::size_t alphabet_size = 64;
  std::size_t base_qam = 256;
  /// iud: square `qam_size`-QAM.
  std::size_t qam_size = 64;

  static SchemeSpec cc(std::size_t alphabet_size, std::size_t base_qam);
  static SchemeSpec iud(std::size_t qam_size);

  /// "cc171", "qam64".
  std::string label() const;
  Alphabet alphabet() const;
  /// Codeword length; 1 for IUD.
  std::size_t blocklength() const;
};

struct BpsSpec {
  bool genie = false;
  /// Odd window length 2N+1.
  int window = 21;

  static BpsSpec off() { return {}; }
  static BpsSpec genie_window(int window) { return {true, window}; }
  /// "off" or "genie21".
  std::string label() const;
  BpsConfig receiver() const;
};

struct LengthRange {
  double start = 2000.0;
  double stop = 3000.0;
  double step = 500.0;

  /// start, start + step, ... up to stop (inclusive within 1e-9 step).
  std::vector<double> values() const;
};

/// Everything a sweep needs. Assumed physical values (fiber constants,
/// launch power, symbol count, oversampling) are plain fields whose values
/// are written to the run manifest.
struct ExperimentConfig {
  std::string preset;
  ScenarioKind scenario = ScenarioKind::idealized;
  LengthRange lengths_km;
  std::vector<SchemeSpec> schemes{SchemeSpec::cc(171, 256), SchemeSpec::iud(64)};
  std::vector<Detection> detection{Detection::mf, Detection::bp_mf};
  std::vector<BpsSpec> bps{BpsSpec::off()};

  int channels_half = 2;
  double spacing_ghz = 50.0;
  std::size_t symbols = 2052;
  std::size_t samples_per_symbol = 8;
  /// Oversampling of the back-propagated channel.
  std::size_t bp_samples_per_symbol = 4;
  std::size_t trials = 3;
  std::uint64_t seed = 1;

  /// Mean launch power per channel, before the amplitude multiplier.
  double launch_power_dbm = -10.0;
  /// Multiplies every launched symbol amplitude.
  double power_multiplier = 1.0;

  double beta2_ps2_per_km = -21.7;
  double gamma_per_w_km = 1.3;
  double symbol_rate_gbaud = 50.0;

  double loss_db_per_km = 0.0;
  double span_length_km = 50.0;
  double noise_figure_db = 5.0;
  bool ase = false;

  PulseKind pulse = PulseKind::sinc;
  double rolloff = 0.0;

  double max_nonlinear_phase = 2e-3;
  double max_step_km = 1.0;

  /// CC codeword boundaries sit at j = codeword_offset (mod blocklength).
  std::size_t codeword_offset = 0;

  /// chi-table: j in [-chi_j_max, chi_j_max] at lengths_km.start.
  int chi_j_max = 1500;
  /// rate-curve: m = 1 .. rate_m_max.
  std::size_t rate_m_max = 1024;

  std::string output = "results.csv";

  /// Throws ConfigError naming the offending field.
  void validate() const;

  PhysicalParams physical() const;
  NormalizationMap map() const;
  PulseShape pulse_shape() const;
  WdmPlan plan() const;
  LinkSpec link(double length_km) const;
  StepPolicy step_policy() const;
  /// Normalized symbol amplitude: multiplier * sqrt(P_launch / P0).
  double amplitude() const;
};

/// Named presets: fig1, cc-rate, fig3, fig4, fig5, fig6.
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(std::string_view name);
/// One line describing how the preset departs from a full-scale run.
std::string preset_note(std::string_view name);

/// Overlay a JSON document onto `base`. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base = {});
/// Pretty-printed JSON; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& cfg);
/// Set one field by dotted key (e.g. "lengths_km.step", "ase"). The value
/// is parsed as JSON, or taken as a string when it does not parse.
ExperimentConfig apply_override(const ExperimentConfig& cfg, std::string_view key,
                                std::string_view value);

}  // namespace ccnli
