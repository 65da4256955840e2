// Command-line front end: sweep, chi-table, rate-curve, validate.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
// diagnostics file is written next to the output).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccnli/config.hpp"
#include "ccnli/error.hpp"
#include "ccnli/experiments.hpp"
#include "ccnli/validation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ccnli;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::string preset_name;
  std::vector<std::string> overrides;
  std::string output;
  bool print_config = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("-p,--preset", o.preset_name, "Preset: fig1, cc-rate, fig3, fig4, fig5, fig6");
  sub->add_option("-s,--set", o.overrides, "Override a field, key=value (repeatable; dotted keys for lengths_km)");
  sub->add_option("-o,--output", o.output, "Output CSV path");
  sub->add_flag("--print-config", o.print_config, "Print the resolved config and exit");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Precedence: preset, then config file, then --set, then --output.
ExperimentConfig resolve(const CommonOptions& o, const std::string& default_preset) {
  const std::string name = o.preset_name.empty() ? default_preset : o.preset_name;
  ExperimentConfig cfg = name.empty() ? ExperimentConfig{} : preset(name);
  if (!o.config_path.empty()) cfg = parse_config(read_file(o.config_path), cfg);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg = apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.output.empty()) cfg.output = o.output;
  return cfg;
}

fs::path sibling(const std::string& output, const std::string& suffix) {
  const fs::path p(output);
  return p.parent_path() / (p.stem().string() + suffix);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int numerical_failure(const std::string& output, const std::string& what) {
  const auto path = sibling(output.empty() ? "ccnli" : output, ".diagnostics.txt");
  write_text(path, what + "\n");
  std::cerr << "numerical failure: " << what << "\n(diagnostics: " << path.string() << ")\n";
  return kExitNumerical;
}

int run_sweep_cmd(const CommonOptions& o) {
  auto cfg = resolve(o, "fig3");
  cfg.validate();
  if (o.print_config) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const auto result = run_sweep(cfg, [](const std::string& msg) { std::cerr << msg << '\n'; });
  std::ostringstream csv;
  write_results_csv(csv, result.rows);
  write_text(cfg.output, csv.str());
  write_text(sibling(cfg.output, ".run-manifest.json"), run_manifest(cfg, &result));
  std::cerr << "wrote " << result.rows.size() << " rows to " << cfg.output << '\n';
  if (!result.failures.empty()) {
    std::ostringstream d;
    for (const auto& f : result.failures)
      d << f.scheme << " trial " << f.trial << " [" << f.kind << "]: " << f.message << '\n';
    return numerical_failure(cfg.output, d.str());
  }
  return 0;
}

int run_chi_cmd(const CommonOptions& o) {
  auto cfg = resolve(o, "fig1");
  if (o.print_config) {
    std::cout << dump_config(cfg);
    return 0;
  }
  std::ostringstream csv;
  emit_chi_table(cfg, csv);
  write_text(cfg.output, csv.str());
  write_text(sibling(cfg.output, ".run-manifest.json"), run_manifest(cfg));
  std::cerr << "wrote " << cfg.output << '\n';
  return 0;
}

int run_rate_cmd(const CommonOptions& o) {
  auto cfg = resolve(o, "cc-rate");
  if (o.print_config) {
    std::cout << dump_config(cfg);
    return 0;
  }
  std::ostringstream csv;
  emit_rate_curve(cfg.rate_m_max, csv);
  write_text(cfg.output, csv.str());
  std::cerr << "wrote " << cfg.output << '\n';
  return 0;
}

int run_validate_cmd(const CommonOptions& o, const ValidationOptions& v) {
  auto cfg = resolve(o, "");
  if (o.print_config) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const auto report = validate_model(cfg, v);
  const std::string text = to_json(report);
  std::cout << text;
  if (!o.output.empty()) write_text(o.output, text);
  if (!report.passed()) return numerical_failure(o.output.empty() ? "validate" : o.output, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-composition codes vs nonlinear interference: experiments"};
  app.require_subcommand(1);

  CommonOptions sweep_opt, chi_opt, rate_opt, val_opt;
  ValidationOptions val;
  auto* sweep = app.add_subcommand("sweep", "SNR sweep over lengths, schemes and receivers");
  add_common(sweep, sweep_opt);
  auto* chi = app.add_subcommand("chi-table", "Dominant XPM coefficients as CSV");
  add_common(chi, chi_opt);
  auto* rate = app.add_subcommand("rate-curve", "CC rate and rate gap versus blocklength");
  add_common(rate, rate_opt);
  auto* validate = app.add_subcommand("validate", "First-order model against the split-step solver");
  add_common(validate, val_opt);
  validate->add_option("--length-km", val.length_km, "Link length");
  validate->add_option("--symbols", val.symbols, "Symbols per channel");
  validate->add_option("--multiplier", val.power_multiplier, "Amplitude multiplier");
  validate->add_option("--max-step-km", val.max_step_km, "Largest split-step step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_cmd(sweep_opt);
    if (*chi) return run_chi_cmd(chi_opt);
    if (*rate) return run_rate_cmd(rate_opt);
    if (*validate) return run_validate_cmd(val_opt, val);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    return numerical_failure("ccnli", e.what());
  } catch (const AliasingError& e) {
    return numerical_failure("ccnli", e.what());
  }
  return 0;
}
