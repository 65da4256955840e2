#include "ccnli/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <thread>

#include "ccnli/csv.hpp"
#include "ccnli/error.hpp"
#include "ccnli/perturbation.hpp"
#include "ccnli/rng.hpp"

namespace ccnli {
namespace {

using nlohmann::json;

constexpr const char* kResultsHeader = "length_km,scheme,detection,bps,snr_db,n_symbols,trials,seed";
constexpr std::uint64_t kAseStream = std::uint64_t{1} << 20;

struct UnitOutput {
  bool ok = false;
  RunFailure failure;
  std::size_t steps = 0;
  // Indexed [length][detection][bps].
  std::vector<SnrAccumulator> cells;
};

// Unit-energy symbols of one channel. CC codewords start at j = offset.
std::vector<cplx> channel_symbols(const SchemeSpec& spec, const Alphabet& a, std::size_t n,
                                  std::uint64_t seed, std::size_t offset) {
  std::vector<cplx> w;
  if (spec.kind == Scheme::cc) {
    const std::size_t m = spec.blocklength();
    w = concatenate(cc_frames(base_word(a), n / m, seed));
  } else {
    w = concatenate(iud_frames(a, n, 1, seed));
  }
  if (offset % n == 0) return w;
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[(i + offset) % n] = w[i];
  return out;
}

void run_unit(const ExperimentConfig& cfg, std::size_t s, std::size_t trial, UnitOutput& out) {
  const SchemeSpec& spec = cfg.schemes[s];
  const Alphabet alphabet = spec.alphabet();
  const WdmPlan plan = cfg.plan();
  const PulseShape pulse = cfg.pulse_shape();
  const NormalizationMap map = cfg.map();
  const StepPolicy policy = cfg.step_policy();
  const double amp = cfg.amplitude();
  const int m = cfg.channels_half;
  const std::size_t n = cfg.symbols;

  SymbolFrame frame(m, n);
  std::vector<cplx> x0;
  for (int k = -m; k <= m; ++k) {
    const auto seed = derive_seed(cfg.seed, {trial, s, static_cast<std::uint64_t>(k + m)});
    auto x = channel_symbols(spec, alphabet, n, seed, cfg.codeword_offset);
    for (std::size_t j = 0; j < n; ++j) frame.at(k, j) = amp * x[j];
    frame.set_scheme(k, spec.kind);
    if (k == 0) x0 = std::move(x);
  }

  const auto lengths = cfg.lengths_km.values();
  PropagationStats stats;
  const auto rx = propagate_taps(modulate(frame, pulse, plan), cfg.link(lengths.back()), policy, lengths,
                                 derive_seed(cfg.seed, {trial, s, kAseStream}), &stats);
  out.steps = stats.steps;

  const std::size_t nd = cfg.detection.size();
  const std::size_t nb = cfg.bps.size();
  out.cells.assign(lengths.size() * nd * nb, SnrAccumulator{});
  const double inv_amp = 1.0 / amp;
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    for (std::size_t di = 0; di < nd; ++di) {
      std::vector<cplx> y;
      if (cfg.detection[di] == Detection::mf) {
        y = matched_filter_detect(channel_select(rx[li], 0, plan), map.to_normalized_distance(lengths[li]),
                                  pulse, n);
      } else {
        const auto ch = channel_select(rx[li], 0, plan, cfg.bp_samples_per_symbol);
        y = matched_filter_detect(back_propagate(ch, cfg.link(lengths[li]), policy), 0.0, pulse, n);
      }
      for (auto& v : y) v *= inv_amp;
      for (std::size_t bi = 0; bi < nb; ++bi) {
        const auto& b = cfg.bps[bi];
        const auto yc = b.genie ? bps_genie(x0, y, b.receiver()) : mean_phase_correct(x0, y);
        out.cells[(li * nd + di) * nb + bi].add(x0, yc);
      }
    }
  }
  out.ok = true;
}

std::string failure_kind(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const AliasingError*>(&e)) return "aliasing";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  return "error";
}

}  // namespace

unsigned worker_count_from_env() {
  if (const char* env = std::getenv("CCNLI_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024)
      throw ConfigError("CCNLI_WORKERS: expected an integer in [1, 1024], got '" + std::string(env) + "'");
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress, unsigned workers) {
  cfg.validate();
  if (!(cfg.amplitude() > 0.0)) throw ConfigError("power_multiplier: a sweep needs a positive amplitude");
  const std::size_t ns = cfg.schemes.size();
  const std::size_t units = ns * cfg.trials;
  std::vector<UnitOutput> outputs(units);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units) return;
      // Trial-major order keeps early progress balanced across schemes.
      const std::size_t trial = u / ns;
      const std::size_t s = u % ns;
      auto& out = outputs[s * cfg.trials + trial];
      try {
        run_unit(cfg, s, trial, out);
      } catch (const std::exception& e) {
        out = UnitOutput{};
        out.failure = {cfg.schemes[s].label(), trial, failure_kind(e), e.what()};
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        std::string msg = "unit " + std::to_string(done.fetch_add(1) + 1) + "/" + std::to_string(units) + ": " +
                          cfg.schemes[s].label() + " trial " + std::to_string(trial);
        msg += out.ok ? " done, " + std::to_string(out.steps) + " steps" : " FAILED (" + out.failure.message + ")";
        progress(msg);
      }
    }
  };
  const unsigned n = std::min<unsigned>(workers == 0 ? worker_count_from_env() : workers,
                                        static_cast<unsigned>(units));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
  }

  SweepResult result;
  const auto lengths = cfg.lengths_km.values();
  const std::size_t nd = cfg.detection.size();
  const std::size_t nb = cfg.bps.size();
  for (const auto& o : outputs) {
    if (!o.ok) result.failures.push_back(o.failure);
    result.forward_steps += o.steps;
  }
  for (std::size_t li = 0; li < lengths.size(); ++li)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t di = 0; di < nd; ++di)
        for (std::size_t bi = 0; bi < nb; ++bi) {
          SnrAccumulator pooled;
          std::size_t trials = 0;
          for (std::size_t t = 0; t < cfg.trials; ++t) {
            const auto& o = outputs[s * cfg.trials + t];
            if (!o.ok) continue;
            pooled.merge(o.cells[(li * nd + di) * nb + bi]);
            ++trials;
          }
          if (trials == 0) continue;
          const auto r = pooled.report();
          result.rows.push_back({lengths[li], cfg.schemes[s].label(), std::string(to_string(cfg.detection[di])),
                                 cfg.bps[bi].label(), r.snr_db, r.n_symbols, trials, cfg.seed});
        }
  return result;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows)
    out << format_double(r.length_km) << ',' << r.scheme << ',' << r.detection << ',' << r.bps << ','
        << format_fixed(r.snr_db, 6) << ',' << r.n_symbols << ',' << r.trials << ',' << r.seed << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw ConfigError(std::string("results: expected header ") + kResultsHeader);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw ConfigError("results: expected 8 columns: " + line);
    rows.push_back({parse_double(f[0]), f[1], f[2], f[3], parse_double(f[4]), std::stoul(f[5]), std::stoul(f[6]),
                    std::stoull(f[7])});
  }
  return rows;
}

std::string run_manifest(const ExperimentConfig& cfg, const SweepResult* result) {
  const auto map = cfg.map();
  const auto plan = cfg.plan();
  json lengths_z = json::array();
  for (const double l : cfg.lengths_km.values()) lengths_z.push_back(map.to_normalized_distance(l));
  json m = {
      {"config", json::parse(dump_config(cfg))},
      {"derived",
       {{"l0_km", map.l0_km()},
        {"t0_ps", map.t0_s() * 1e12},
        {"p0_mw", map.p0_w() * 1e3},
        {"amplitude", cfg.amplitude()},
        {"normalized_spacing", plan.spacing},
        {"effective_spacing", plan.effective_spacing()},
        {"grid_size", plan.grid_size()},
        {"lengths_normalized", lengths_z}}},
      // Physical and numerical choices without a measured value; each is a config field.
      {"unstated_parameters",
       {{"beta2_ps2_per_km", cfg.beta2_ps2_per_km},
        {"gamma_per_w_km", cfg.gamma_per_w_km},
        {"symbol_rate_gbaud", cfg.symbol_rate_gbaud},
        {"launch_power_dbm", cfg.launch_power_dbm},
        {"power_multiplier", cfg.power_multiplier},
        {"symbols", cfg.symbols},
        {"samples_per_symbol", cfg.samples_per_symbol},
        {"noise_figure_db", cfg.noise_figure_db},
        {"max_nonlinear_phase", cfg.max_nonlinear_phase}}},
      {"snr", {{"edge_exclusion", kSnrEdgeExclusion}, {"cap_db", kSnrCapDb}}},
  };
  if (!cfg.preset.empty()) {
    try {
      m["preset_note"] = preset_note(cfg.preset);
    } catch (const ConfigError&) {
    }
  }
  if (result != nullptr) {
    json failures = json::array();
    for (const auto& f : result->failures)
      failures.push_back({{"scheme", f.scheme}, {"trial", f.trial}, {"kind", f.kind}, {"message", f.message}});
    m["result"] = {{"rows", result->rows.size()}, {"forward_steps", result->forward_steps}, {"failures", failures}};
  }
  return m.dump(2) + "\n";
}

void emit_chi_table(const ExperimentConfig& cfg, std::ostream& out, unsigned workers) {
  if (std::abs(cfg.spacing_ghz - cfg.symbol_rate_gbaud) > 1e-9 * cfg.symbol_rate_gbaud)
    throw ConfigError("spacing_ghz: chi coefficients assume a channel spacing equal to the symbol rate");
  if (cfg.pulse != PulseKind::sinc) throw ConfigError("pulse: chi coefficients are defined for sinc pulses");
  if (cfg.channels_half < 0) throw ConfigError("channels_half: must be non-negative");
  if (cfg.chi_j_max < 0) throw ConfigError("chi_j_max: must be non-negative");
  const double z = cfg.map().to_normalized_distance(cfg.lengths_km.start);
  const int m = cfg.channels_half;
  const int jm = cfg.chi_j_max;
  const auto table = PerturbTable::compute(z, m, -jm, jm, {}, workers == 0 ? worker_count_from_env() : workers);
  out << "k,j,re_chi,im_chi,im_chi_mirror\n";
  for (int k = -m; k <= m; ++k)
    for (int j = -jm; j <= jm; ++j) {
      const cplx c = table.at(k, j);
      out << k << ',' << j << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << ','
          << format_double(table.at(-k, -j).imag()) << '\n';
    }
}

void emit_rate_curve(std::size_t m_max, std::ostream& out) {
  if (m_max < 1) throw ConfigError("rate_m_max: must be at least 1");
  out << "m,cc_rate,iud_rate,gap\n";
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double cc = cc_rate(all_ones(m));
    const double iud = std::log2(static_cast<double>(m));
    out << m << ',' << format_double(cc) << ',' << format_double(iud) << ',' << format_double(rate_gap(m)) << '\n';
  }
}

}  // namespace ccnli
