#include "ccnli/validation.hpp"

#include <cmath>
#include <json.hpp>

#include "ccnli/codebook.hpp"
#include "ccnli/error.hpp"
#include "ccnli/perturbation.hpp"
#include "ccnli/rng.hpp"
#include "ccnli/ssfm.hpp"

namespace ccnli {
namespace {

struct Detected {
  std::vector<cplx> sim;
  std::vector<cplx> pred;
};

// Perturbations of channel 0 from the split-step solver and from the
// first-order field, both relative to amp * x0.
Detected perturbations(const ExperimentConfig& cfg, const ValidationOptions& opt, const SymbolFrame& unit,
                       double amp) {
  const WdmPlan plan = cfg.plan();
  const PulseShape pulse = cfg.pulse_shape();
  const double z = cfg.map().to_normalized_distance(opt.length_km);
  const SampledSignal tx = modulate(unit.scaled(amp), pulse, plan);

  LinkSpec link = cfg.link(opt.length_km);
  StepPolicy policy;
  policy.max_step_km = opt.max_step_km;
  policy.max_nonlinear_phase = opt.max_nonlinear_phase;
  auto sim = matched_filter_detect(channel_select(propagate(tx, link, policy), 0, plan), z, pulse, plan.symbols);
  auto pred = matched_filter_detect(channel_select(first_order_field(tx, z, {opt.max_panel}), 0, plan), z, pulse,
                                    plan.symbols);
  for (std::size_t j = 0; j < plan.symbols; ++j) {
    const cplx a = amp * unit.at(0, j);
    sim[j] -= a;
    pred[j] = predict_rx_symbol(a, pred[j], 1.0) - a;
  }
  return {std::move(sim), std::move(pred)};
}

double rms_difference(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

ValidationReport validate_model(const ExperimentConfig& base, const ValidationOptions& opt) {
  ExperimentConfig cfg = base;
  cfg.scenario = ScenarioKind::idealized;
  cfg.loss_db_per_km = 0.0;
  cfg.ase = false;
  cfg.symbols = opt.symbols;
  cfg.power_multiplier = opt.power_multiplier;
  cfg.schemes = {SchemeSpec::iud(64)};
  cfg.lengths_km = {opt.length_km, opt.length_km, 1.0};
  cfg.validate();
  if (!(opt.power_multiplier > 0.0)) throw ConfigError("validate: power_multiplier must be positive");

  const WdmPlan plan = cfg.plan();
  const PulseShape pulse = cfg.pulse_shape();
  const int m = cfg.channels_half;
  const Alphabet a = qam(64);
  SymbolFrame unit(m, opt.symbols);
  for (int k = -m; k <= m; ++k) {
    const auto x = concatenate(iud_frames(a, opt.symbols, 1, derive_seed(opt.seed, {static_cast<std::uint64_t>(k + m)})));
    for (std::size_t j = 0; j < opt.symbols; ++j) unit.at(k, j) = x[j];
  }

  ValidationReport r;
  r.n_symbols = opt.symbols;
  r.amplitude = cfg.amplitude();

  // epsilon = 0: linear propagation and the zero-order prediction both give a.
  const double z = cfg.map().to_normalized_distance(opt.length_km);
  const auto lin = matched_filter_detect(
      channel_select(disperse(modulate(unit.scaled(r.amplitude), pulse, plan), z, Boundary::periodic), 0, plan), z,
      pulse, plan.symbols);
  for (std::size_t j = 0; j < opt.symbols; ++j) {
    const cplx x = r.amplitude * unit.at(0, j);
    r.linear_error = std::max(r.linear_error, std::abs(lin[j] - x) / r.amplitude);
    r.linear_error = std::max(r.linear_error, std::abs(predict_rx_symbol(x, lin[j], 0.0) - x) / r.amplitude);
  }
  r.pass_linear = r.linear_error <= 1e-9;

  const auto full = perturbations(cfg, opt, unit, r.amplitude);
  cplx cross{};
  double es = 0.0;
  double ep = 0.0;
  for (std::size_t j = 0; j < opt.symbols; ++j) {
    cross += full.sim[j] * std::conj(full.pred[j]);
    es += std::norm(full.sim[j]);
    ep += std::norm(full.pred[j]);
  }
  r.correlation = (es > 0.0 && ep > 0.0) ? std::abs(cross) / std::sqrt(es * ep) : 0.0;
  r.delta_rms = std::sqrt(es / static_cast<double>(opt.symbols));
  r.residual_full = rms_difference(full.sim, full.pred);

  const auto half = perturbations(cfg, opt, unit, 0.5 * r.amplitude);
  r.residual_half = rms_difference(half.sim, half.pred);
  r.shrink = r.residual_half > 0.0 ? r.residual_full / r.residual_half : INFINITY;

  r.pass_correlation = r.correlation >= opt.min_correlation;
  r.pass_shrink = r.shrink >= opt.min_shrink;
  return r;
}

std::string to_json(const ValidationReport& r) {
  const nlohmann::json j = {
      {"n_symbols", r.n_symbols},     {"amplitude", r.amplitude},
      {"linear_error", r.linear_error}, {"correlation", r.correlation},
      {"residual_full", r.residual_full}, {"residual_half", r.residual_half},
      {"shrink", r.shrink},           {"delta_rms", r.delta_rms},
      {"pass_linear", r.pass_linear}, {"pass_correlation", r.pass_correlation},
      {"pass_shrink", r.pass_shrink}, {"passed", r.passed()},
  };
  return j.dump(2) + "\n";
}

}  // namespace ccnli
