#include "ccnli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "ccnli/error.hpp"

namespace ccnli {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(std::string_view field, std::string_view what) {
  throw ConfigError(std::string(field) + ": " + std::string(what));
}

json scheme_to_json(const SchemeSpec& s) {
  if (s.kind == Scheme::cc)
    return {{"cc", {{"alphabet_size", s.alphabet_size}, {"base_qam", s.base_qam}}}};
  return {{"iud", {{"qam_size", s.qam_size}}}};
}

std::size_t label_number(std::string_view label, std::string_view prefix) {
  const std::string digits(label.substr(prefix.size()));
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    field_error("schemes", "cannot parse '" + std::string(label) + "'");
  return std::stoul(digits);
}

SchemeSpec scheme_from_json(const json& j) {
  // Short forms "cc171" (least-energy subset of 256-QAM) and "qam64".
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.rfind("cc", 0) == 0) return SchemeSpec::cc(label_number(s, "cc"), 256);
    if (s.rfind("qam", 0) == 0) return SchemeSpec::iud(label_number(s, "qam"));
    field_error("schemes", "unknown scheme '" + s + "'");
  }
  if (!j.is_object() || j.size() != 1) field_error("schemes", "each entry is {\"cc\": {...}} or {\"iud\": {...}}");
  if (j.contains("cc")) {
    const auto& c = j.at("cc");
    return SchemeSpec::cc(c.value("alphabet_size", std::size_t{171}), c.value("base_qam", std::size_t{256}));
  }
  if (j.contains("iud")) return SchemeSpec::iud(j.at("iud").value("qam_size", std::size_t{64}));
  field_error("schemes", "unknown scheme kind " + j.begin().key());
}

json bps_to_json(const BpsSpec& b) {
  if (!b.genie) return "off";
  return {{"genie", {{"window", b.window}}}};
}

BpsSpec bps_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "off") return BpsSpec::off();
    if (s == "genie") return BpsSpec::genie_window(21);
    // The label form written to result rows, e.g. "genie21".
    if (s.size() > 5 && s.size() <= 11 && s.starts_with("genie") &&
        std::all_of(s.begin() + 5, s.end(), [](unsigned char c) { return std::isdigit(c); }))
      return BpsSpec::genie_window(std::stoi(s.substr(5)));
    field_error("bps", "expected \"off\", \"genie\", \"genieN\" or {\"genie\": {\"window\": n}}, got '" + s + "'");
  }
  if (j.is_object() && j.contains("genie"))
    return BpsSpec::genie_window(j.at("genie").value("window", 21));
  field_error("bps", "expected \"off\", \"genie\", \"genieN\" or {\"genie\": {\"window\": n}}");
}

Detection detection_from_string(const std::string& s) {
  if (s == "mf") return Detection::mf;
  if (s == "bp+mf") return Detection::bp_mf;
  field_error("detection", "expected \"mf\" or \"bp+mf\", got '" + s + "'");
}

json to_json(const ExperimentConfig& c) {
  json schemes = json::array();
  for (const auto& s : c.schemes) schemes.push_back(scheme_to_json(s));
  json detection = json::array();
  for (const auto d : c.detection) detection.push_back(std::string(to_string(d)));
  json bps = json::array();
  for (const auto& b : c.bps) bps.push_back(bps_to_json(b));
  return {
      {"preset", c.preset},
      {"scenario", std::string(to_string(c.scenario))},
      {"lengths_km", {{"start", c.lengths_km.start}, {"stop", c.lengths_km.stop}, {"step", c.lengths_km.step}}},
      {"schemes", schemes},
      {"detection", detection},
      {"bps", bps},
      {"channels_half", c.channels_half},
      {"spacing_ghz", c.spacing_ghz},
      {"symbols", c.symbols},
      {"samples_per_symbol", c.samples_per_symbol},
      {"bp_samples_per_symbol", c.bp_samples_per_symbol},
      {"trials", c.trials},
      {"seed", c.seed},
      {"launch_power_dbm", c.launch_power_dbm},
      {"power_multiplier", c.power_multiplier},
      {"beta2_ps2_per_km", c.beta2_ps2_per_km},
      {"gamma_per_w_km", c.gamma_per_w_km},
      {"symbol_rate_gbaud", c.symbol_rate_gbaud},
      {"loss_db_per_km", c.loss_db_per_km},
      {"span_length_km", c.span_length_km},
      {"noise_figure_db", c.noise_figure_db},
      {"ase", c.ase},
      {"pulse", c.pulse == PulseKind::sinc ? "sinc" : "rrc"},
      {"rolloff", c.rolloff},
      {"max_nonlinear_phase", c.max_nonlinear_phase},
      {"max_step_km", c.max_step_km},
      {"codeword_offset", c.codeword_offset},
      {"chi_j_max", c.chi_j_max},
      {"rate_m_max", c.rate_m_max},
      {"output", c.output},
  };
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    field_error(key, e.what());
  }
}

ExperimentConfig from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  const json known = to_json(c);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) field_error(key, "unknown field");

  read(j, "preset", c.preset);
  if (j.contains("scenario")) {
    const auto s = j.at("scenario").get<std::string>();
    if (s == "idealized") c.scenario = ScenarioKind::idealized;
    else if (s == "realistic") c.scenario = ScenarioKind::realistic;
    else field_error("scenario", "expected \"idealized\" or \"realistic\", got '" + s + "'");
  }
  if (j.contains("lengths_km")) {
    const auto& l = j.at("lengths_km");
    if (!l.is_object()) field_error("lengths_km", "expected {start, stop, step}");
    for (const auto& [key, value] : l.items())
      if (key != "start" && key != "stop" && key != "step") field_error("lengths_km." + key, "unknown field");
    read(l, "start", c.lengths_km.start);
    read(l, "stop", c.lengths_km.stop);
    read(l, "step", c.lengths_km.step);
  }
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(scheme_from_json(s));
  }
  if (j.contains("detection")) {
    c.detection.clear();
    for (const auto& d : j.at("detection")) c.detection.push_back(detection_from_string(d.get<std::string>()));
  }
  if (j.contains("bps")) {
    c.bps.clear();
    const auto& b = j.at("bps");
    if (b.is_array()) {
      for (const auto& e : b) c.bps.push_back(bps_from_json(e));
    } else {
      c.bps.push_back(bps_from_json(b));
    }
  }
  read(j, "channels_half", c.channels_half);
  read(j, "spacing_ghz", c.spacing_ghz);
  read(j, "symbols", c.symbols);
  read(j, "samples_per_symbol", c.samples_per_symbol);
  read(j, "bp_samples_per_symbol", c.bp_samples_per_symbol);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "launch_power_dbm", c.launch_power_dbm);
  read(j, "power_multiplier", c.power_multiplier);
  read(j, "beta2_ps2_per_km", c.beta2_ps2_per_km);
  read(j, "gamma_per_w_km", c.gamma_per_w_km);
  read(j, "symbol_rate_gbaud", c.symbol_rate_gbaud);
  read(j, "loss_db_per_km", c.loss_db_per_km);
  read(j, "span_length_km", c.span_length_km);
  read(j, "noise_figure_db", c.noise_figure_db);
  read(j, "ase", c.ase);
  if (j.contains("pulse")) {
    const auto p = j.at("pulse").get<std::string>();
    if (p == "sinc") c.pulse = PulseKind::sinc;
    else if (p == "rrc") c.pulse = PulseKind::rrc;
    else field_error("pulse", "expected \"sinc\" or \"rrc\", got '" + p + "'");
  }
  read(j, "rolloff", c.rolloff);
  read(j, "max_nonlinear_phase", c.max_nonlinear_phase);
  read(j, "max_step_km", c.max_step_km);
  read(j, "codeword_offset", c.codeword_offset);
  read(j, "chi_j_max", c.chi_j_max);
  read(j, "rate_m_max", c.rate_m_max);
  read(j, "output", c.output);
  return c;
}

// Sweep lengths on the grid start + i*step; the stop point is included when
// it lies within this fraction of a step.
constexpr double kLengthSlack = 1e-9;

}  // namespace

std::string_view to_string(ScenarioKind s) { return s == ScenarioKind::idealized ? "idealized" : "realistic"; }
std::string_view to_string(Detection d) { return d == Detection::mf ? "mf" : "bp+mf"; }

SchemeSpec SchemeSpec::cc(std::size_t alphabet_size, std::size_t base_qam) {
  SchemeSpec s;
  s.kind = Scheme::cc;
  s.alphabet_size = alphabet_size;
  s.base_qam = base_qam;
  return s;
}

SchemeSpec SchemeSpec::iud(std::size_t qam_size) {
  SchemeSpec s;
  s.kind = Scheme::iud;
  s.qam_size = qam_size;
  return s;
}

std::string SchemeSpec::label() const {
  return kind == Scheme::cc ? "cc" + std::to_string(alphabet_size) : "qam" + std::to_string(qam_size);
}

Alphabet SchemeSpec::alphabet() const {
  if (kind == Scheme::iud) return qam(qam_size);
  if (alphabet_size == 0 || alphabet_size > base_qam)
    field_error("schemes", "cc alphabet_size must be in [1, base_qam]");
  Alphabet a = lowest_energy_subset(qam(base_qam), alphabet_size);
  return Alphabet(a.points(), label());
}

std::size_t SchemeSpec::blocklength() const { return kind == Scheme::cc ? alphabet_size : 1; }

std::string BpsSpec::label() const { return genie ? "genie" + std::to_string(window) : "off"; }

BpsConfig BpsSpec::receiver() const {
  BpsConfig b;
  b.enabled = genie;
  b.half_window = (window - 1) / 2;
  return b;
}

std::vector<double> LengthRange::values() const {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + kLengthSlack * step) break;
    out.push_back(v);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!(lengths_km.start > 0.0)) field_error("lengths_km.start", "must be positive");
  if (!(lengths_km.start <= lengths_km.stop)) field_error("lengths_km", "start must not exceed stop");
  if (!(lengths_km.step > 0.0)) field_error("lengths_km.step", "must be positive");
  if (schemes.empty()) field_error("schemes", "at least one scheme is required");
  if (detection.empty()) field_error("detection", "at least one detection mode is required");
  if (bps.empty()) field_error("bps", "at least one entry is required");
  for (const auto& b : bps)
    if (b.genie && (b.window < 1 || b.window % 2 == 0)) field_error("bps", "genie window must be odd and positive");
  if (channels_half < 0) field_error("channels_half", "must be non-negative");
  if (!(spacing_ghz > 0.0)) field_error("spacing_ghz", "must be positive");
  if (symbols == 0) field_error("symbols", "must be positive");
  if (samples_per_symbol < 2) field_error("samples_per_symbol", "must be at least 2");
  if (bp_samples_per_symbol < 2) field_error("bp_samples_per_symbol", "must be at least 2");
  if (trials < 1) field_error("trials", "must be at least 1");
  if (!std::isfinite(launch_power_dbm)) field_error("launch_power_dbm", "must be finite");
  if (!(power_multiplier >= 0.0)) field_error("power_multiplier", "must be non-negative");
  if (!(beta2_ps2_per_km < 0.0)) field_error("beta2_ps2_per_km", "must be negative (anomalous dispersion)");
  if (!(gamma_per_w_km > 0.0)) field_error("gamma_per_w_km", "must be positive");
  if (!(symbol_rate_gbaud > 0.0)) field_error("symbol_rate_gbaud", "must be positive");
  if (!(loss_db_per_km >= 0.0)) field_error("loss_db_per_km", "must be non-negative");
  if (scenario == ScenarioKind::idealized && loss_db_per_km != 0.0)
    field_error("loss_db_per_km", "idealized runs are lossless; set scenario to \"realistic\"");
  if (scenario == ScenarioKind::idealized && ase)
    field_error("ase", "idealized runs are noise-free; set scenario to \"realistic\"");
  if (scenario == ScenarioKind::realistic && !(span_length_km > 0.0))
    field_error("span_length_km", "must be positive");
  if (pulse == PulseKind::sinc && rolloff != 0.0) field_error("rolloff", "must be 0 for sinc pulses");
  if (!(max_step_km > 0.0)) field_error("max_step_km", "must be positive");
  if (chi_j_max < 0) field_error("chi_j_max", "must be non-negative");
  if (rate_m_max < 1) field_error("rate_m_max", "must be at least 1");
  for (const auto& s : schemes) {
    (void)s.alphabet();
    if (symbols % s.blocklength() != 0)
      field_error("symbols", "must be a multiple of the " + s.label() + " blocklength " +
                                 std::to_string(s.blocklength()));
  }
  if (scenario == ScenarioKind::realistic)
    for (const double l : lengths_km.values()) {
      const double spans = l / span_length_km;
      if (std::abs(spans - std::round(spans)) > 1e-9)
        field_error("lengths_km", "realistic lengths must be whole spans of span_length_km");
    }
  try {
    pulse_shape().validate();
    plan().validate(pulse_shape());
    step_policy().validate();
    link(lengths_km.stop).validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PhysicalParams ExperimentConfig::physical() const {
  PhysicalParams p;
  p.beta2_s2_per_km = beta2_ps2_per_km * 1e-24;
  p.gamma_per_w_km = gamma_per_w_km;
  p.symbol_interval_s = 1.0 / (symbol_rate_gbaud * 1e9);
  return p;
}

NormalizationMap ExperimentConfig::map() const { return normalize(physical()); }

PulseShape ExperimentConfig::pulse_shape() const { return {pulse, rolloff}; }

WdmPlan ExperimentConfig::plan() const {
  WdmPlan p;
  p.channels_half = channels_half;
  p.spacing = spacing_ghz / symbol_rate_gbaud;
  p.symbols = symbols;
  p.samples_per_symbol = samples_per_symbol;
  return p;
}

LinkSpec ExperimentConfig::link(double length_km) const {
  LinkSpec l;
  l.map = map();
  l.total_length_km = length_km;
  if (scenario == ScenarioKind::realistic) {
    l.loss_db_per_km = loss_db_per_km;
    l.span_length_km = span_length_km;
    l.amp = Amplification::edfa;
    l.noise_figure_db = noise_figure_db;
    l.ase = ase;
  }
  return l;
}

StepPolicy ExperimentConfig::step_policy() const {
  StepPolicy s;
  s.max_nonlinear_phase = max_nonlinear_phase;
  s.max_step_km = max_step_km;
  return s;
}

double ExperimentConfig::amplitude() const {
  const double watt = 1e-3 * std::pow(10.0, launch_power_dbm / 10.0);
  return power_multiplier * std::sqrt(map().to_normalized_power(watt));
}

// ---------------------------------------------------------------------------

std::vector<std::string> preset_names() { return {"fig1", "cc-rate", "fig3", "fig4", "fig5", "fig6"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  if (name == "fig1") {
    c.lengths_km = {2000.0, 2000.0, 1.0};
    c.output = "chi_2000km.csv";
    return c;
  }
  if (name == "cc-rate") {
    c.output = "rate_curve.csv";
    return c;
  }
  if (name == "fig3" || name == "fig4") {
    c.lengths_km = {2000.0, 3000.0, 500.0};
    // Longer than the 3000 km walk-off of channels +-2 (~2045 symbols), so
    // the periodic sequence never collides with its own image.
    c.symbols = 4104;
    // Genie-BPS gains are a few tenths of a dB against a per-trial spread of
    // about 0.6 dB; 12 trials bring the standard error to about 0.2 dB.
    c.trials = 12;
    if (name == "fig4") c.bps = {BpsSpec::genie_window(21)};
    c.output = std::string(name) + ".csv";
    return c;
  }
  if (name == "fig5" || name == "fig6") {
    c.scenario = ScenarioKind::realistic;
    c.lengths_km = {2000.0, 3000.0, 1000.0};
    c.symbols = 4104;
    c.loss_db_per_km = 0.2;
    c.span_length_km = 50.0;
    c.ase = true;
    c.pulse = PulseKind::rrc;
    c.rolloff = 0.06;
    // 50 GHz spacing including the roll-off as guard band.
    c.symbol_rate_gbaud = 50.0 / 1.06;
    // Optimum launch power of 64-QAM with matched filtering at 2000 km on a
    // 2 dB grid (18.2 dB; 16.7 dB at -2 dBm, 17.8 dB at -6 dBm).
    c.launch_power_dbm = -4.0;
    if (name == "fig6") c.bps = {BpsSpec::genie_window(21)};
    c.output = std::string(name) + ".csv";
    return c;
  }
  throw ConfigError("preset: unknown name '" + std::string(name) + "'");
}

std::string preset_note(std::string_view name) {
  if (name == "fig1") return "chi_{k,j} at 2000 km for |k| <= 2, |j| <= 1500";
  if (name == "cc-rate") return "CC rate and rate gap for m = 1..1024";
  if (name == "fig3" || name == "fig4")
    return "lengths 2000-3000 km every 500 km (full scale: every 20 km to 4500 km), 12 trials of 4104 symbols";
  if (name == "fig5" || name == "fig6")
    return "lengths 2000 and 3000 km (full scale: every 20 km to 4500 km), 3 trials of 4104 symbols";
  throw ConfigError("preset: unknown name '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // A named preset is the base the rest of the document overrides.
  if (j.is_object() && j.contains("preset") && j.at("preset").is_string()) {
    const auto name = j.at("preset").get<std::string>();
    if (!name.empty() && name != base.preset) base = preset(name);
  }
  return from_json(j, std::move(base));
}

std::string dump_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig apply_override(const ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = std::string(value);
  }
  json doc = json::object();
  const std::string k(key);
  const auto dot = k.find('.');
  if (dot == std::string::npos) {
    doc[k] = v;
  } else {
    json inner = to_json(cfg)[k.substr(0, dot)];
    if (!inner.is_object()) field_error(k, "not a nested field");
    inner[k.substr(dot + 1)] = v;
    doc[k.substr(0, dot)] = inner;
  }
  return from_json(doc, cfg);
}

}  // namespace ccnli
