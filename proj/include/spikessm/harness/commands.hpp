#pragma once

// The work behind each CLI subcommand. Every command returns a nested JSON
// document, a flat table for CSV output, and whether it succeeded; the CLI
// only parses flags and picks the output format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "spikessm/block.hpp"
#include "spikessm/energy.hpp"
#include "spikessm/harness/config.hpp"
#include "spikessm/harness/report.hpp"
#include "spikessm/harness/suites.hpp"
#include "spikessm/harness/timing.hpp"
#include "spikessm/harness/workloads.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"

namespace spikessm::harness {

struct CommandResult {
  Json doc;
  Table table;
  bool ok = true;
};

inline Json neuron_json(const NeuronParams& p) {
  return {{"tau", p.tau},
          {"tau_r", p.tau_r},
          {"v_th", p.v_th},
          {"u_th", p.u_th},
          {"reset_mode", std::string(to_string(p.reset_mode))}};
}

// ---------------------------------------------------------------- verify

struct VerifySizes {
  std::size_t equivalence = 1000;
  std::size_t decomposition = 500;
  std::size_t fft = 200;
  std::size_t ssm = 100;
  std::size_t refractory_kernel = 200;
  std::size_t soundness = 200;
};

inline CommandResult cmd_verify(const Config& config, double input_stddev = 1.0,
                                const VerifySizes& sizes = {}) {
  const std::uint64_t seed = config.seed;
  std::vector<SuiteResult> suites;
  suites.push_back(oracle_equivalence_suite(seed, sizes.equivalence, ConvEngine::kFft));
  suites.push_back(
      oracle_equivalence_suite(seed, sizes.equivalence, ConvEngine::kRecurrence));
  suites.push_back(decomposition_suite(seed, sizes.decomposition));
  suites.push_back(fft_suite(seed, sizes.fft));
  suites.push_back(ssm_suite(seed, sizes.ssm));
  suites.push_back(refractory_kernel_suite(seed, sizes.refractory_kernel));
  suites.push_back(bound_soundness_suite(seed, sizes.soundness, ConvEngine::kFft));
  suites.push_back(
      bound_soundness_suite(seed, sizes.soundness, ConvEngine::kRecurrence));

  CommandResult out;
  out.table = Table({"suite", "cases", "passed", "worst", "tolerance",
                     "resampled", "ok"});
  Json list = Json::array();
  for (const auto& s : suites) {
    out.ok &= s.ok();
    Json failures = Json::array();
    for (const auto& f : s.failures)
      failures.push_back({{"instance", f.instance},
                          {"seed", f.seed},
                          {"params", f.params},
                          {"first_index", f.first_index},
                          {"detail", f.detail}});
    list.push_back({{"name", s.name},
                    {"cases", s.cases},
                    {"passed", s.passed},
                    {"worst", s.worst},
                    {"tolerance", s.tolerance},
                    {"resampled", s.resampled},
                    {"ok", s.ok()},
                    {"failures", failures}});
    out.table.add_row({s.name, cell(s.cases), cell(s.passed), cell(s.worst),
                       cell(s.tolerance), cell(s.resampled), cell(s.ok())});
  }

  // Informational: the configured budget on seeded Gaussian input. A nonzero
  // fuzzy rate here is expected for small budgets and does not fail verify.
  const auto op = operating_point(config.neuron, config.bench.lengths.front(),
                                  config.bench.channels, config.bench.iters,
                                  seed, input_stddev, config.bench.engine);
  out.doc = {{"command", "verify"},
             {"seed", seed},
             {"ok", out.ok},
             {"suites", list},
             {"operating_point",
              {{"neuron", neuron_json(config.neuron)},
               {"length", op.length},
               {"channels", op.channels},
               {"iters", op.iters},
               {"input_stddev", input_stddev},
               {"explicit_fraction", op.explicit_fraction},
               {"fuzzy_rate", op.fuzzy_rate},
               {"spiking_rate", op.spiking_rate}}}};
  return out;
}

// ----------------------------------------------------------------- bench

struct BenchRow {
  std::size_t length = 0;
  TimingStats serial;
  TimingStats pmbc;
  double fuzzy_rate = 0.0;
  double agreement = 0.0;  // fraction of time steps whose spike matches serial
  double speedup() const { return serial.median / pmbc.median; }
};

inline BenchRow bench_length(const Config& config, std::size_t length) {
  const auto& b = config.bench;
  Rng rng = make_rng(config.seed, 0x62656e + length);
  const auto inputs = gaussian_batch(rng, b.channels, length);
  PmbcOptions o;
  o.max_iters = b.iters;
  o.mode = b.fire_mode;
  o.engine = b.engine;
  o.seed = config.seed;
  o.threads = b.threads;

  std::vector<LifOutput> serial(inputs.size());
  std::vector<PmbcResult> batched;
  auto run_serial = [&] {
    for (std::size_t c = 0; c < inputs.size(); ++c)
      serial[c] = serial_lif(config.neuron, inputs[c]);
  };
  auto run_pmbc = [&] { batched = pmbc_solve_batch(config.neuron, inputs, o); };

  BenchRow row;
  row.length = length;
  std::tie(row.serial, row.pmbc) = time_paired(run_serial, run_pmbc, b.repeats, b.warmup);
  std::size_t matching = 0;
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    row.fuzzy_rate += batched[c].fuzzy_rate;
    for (std::size_t t = 0; t < length; ++t)
      matching += batched[c].spikes[t] == serial[c].spikes[t];
  }
  row.fuzzy_rate /= static_cast<double>(inputs.size());
  row.agreement = static_cast<double>(matching) /
                  static_cast<double>(inputs.size() * length);
  return row;
}

inline CommandResult cmd_bench(const Config& config) {
  const auto& b = config.bench;
  CommandResult out;
  out.table = Table({"length", "channels", "iters", "engine", "serial_median_s",
                     "pmbc_median_s", "serial_solves_per_s", "pmbc_solves_per_s",
                     "serial_steps_per_s", "pmbc_steps_per_s", "speedup",
                     "fuzzy_rate", "agreement"});
  Json rows = Json::array();
  for (std::size_t length : b.lengths) {
    const BenchRow r = bench_length(config, length);
    const double steps = static_cast<double>(length * b.channels);
    rows.push_back({{"length", length},
                    {"serial_median_s", r.serial.median},
                    {"pmbc_median_s", r.pmbc.median},
                    {"serial_solves_per_s", 1.0 / r.serial.median},
                    {"pmbc_solves_per_s", 1.0 / r.pmbc.median},
                    {"serial_steps_per_s", steps / r.serial.median},
                    {"pmbc_steps_per_s", steps / r.pmbc.median},
                    {"speedup", r.speedup()},
                    {"fuzzy_rate", r.fuzzy_rate},
                    {"agreement", r.agreement}});
    out.table.add_row({cell(length), cell(b.channels), cell(b.iters),
                       cell(to_string(b.engine)), cell(r.serial.median),
                       cell(r.pmbc.median), cell(1.0 / r.serial.median),
                       cell(1.0 / r.pmbc.median), cell(steps / r.serial.median),
                       cell(steps / r.pmbc.median), cell(r.speedup()),
                       cell(r.fuzzy_rate), cell(r.agreement)});
  }
  out.doc = {{"command", "bench"},
             {"seed", config.seed},
             {"neuron", neuron_json(config.neuron)},
             {"channels", b.channels},
             {"iters", b.iters},
             {"fire_mode", std::string(to_string(b.fire_mode))},
             {"engine", std::string(to_string(b.engine))},
             {"threads", b.threads},
             {"repeats", b.repeats},
             {"warmup", b.warmup},
             {"rows", rows}};
  return out;
}

// -------------------------------------------------------------- converge

struct ConvergencePoint {
  std::size_t length = 0;
  std::size_t budget = 0;
  double explicit_fraction = 0.0;
  double fuzzy_rate = 0.0;
};

// One solve with budget M yields the curve for every budget b <= M: round b
// of a longer run is exactly round b of a run with budget b, and a solve that
// stops early sits at a fixed point for the remaining budgets.
inline std::vector<ConvergencePoint> convergence_curve(const Config& config,
                                                       std::size_t length,
                                                       double input_stddev = 1.0) {
  const auto& b = config.bench;
  Rng rng = make_rng(config.seed, 0x636f6e + length);
  const auto inputs = gaussian_batch(rng, b.channels, length, input_stddev);
  PmbcOptions o;
  o.max_iters = b.iters;
  o.engine = b.engine;
  o.threads = b.threads;
  const auto results = pmbc_solve_batch(config.neuron, inputs, o);

  std::vector<ConvergencePoint> curve(b.iters);
  for (std::size_t m = 0; m < b.iters; ++m) {
    curve[m].length = length;
    curve[m].budget = m + 1;
    for (const auto& r : results) {
      const auto& h = r.explicit_history;
      curve[m].explicit_fraction += h[std::min(m, h.size() - 1)];
    }
    curve[m].explicit_fraction /= static_cast<double>(results.size());
    curve[m].fuzzy_rate = 1.0 - curve[m].explicit_fraction;
  }
  return curve;
}

inline CommandResult cmd_converge(const Config& config, double input_stddev = 1.0) {
  CommandResult out;
  out.table = Table({"length", "budget", "explicit_fraction", "fuzzy_rate"});
  Json rows = Json::array();
  for (std::size_t length : config.bench.lengths) {
    for (const auto& p : convergence_curve(config, length, input_stddev)) {
      rows.push_back({{"length", p.length},
                      {"budget", p.budget},
                      {"explicit_fraction", p.explicit_fraction},
                      {"fuzzy_rate", p.fuzzy_rate}});
      out.table.add_row({cell(p.length), cell(p.budget),
                         cell(p.explicit_fraction), cell(p.fuzzy_rate)});
    }
  }
  out.doc = {{"command", "converge"},
             {"seed", config.seed},
             {"neuron", neuron_json(config.neuron)},
             {"channels", config.bench.channels},
             {"input_stddev", input_stddev},
             {"engine", std::string(to_string(config.bench.engine))},
             {"rows", rows}};
  return out;
}

// ------------------------------------------------------------------ demo

struct BoundTraceRow {
  std::size_t iteration = 0;
  std::size_t t = 0;
  double k = 0.0, m_up = 0.0, m_low = 0.0;
  bool s_up = true, s_low = false;
};

struct DemoRun {
  std::vector<BlockParams> blocks;
  std::vector<BlockOutput> outputs;
  std::vector<BoundTraceRow> trace;
  bool trace_monotone = true;
};

struct TraceTarget {
  std::size_t layer = 0;
  std::size_t channel = 0;
};

// m_up may only fall and m_low only rise from one round to the next. The
// recurrence engine evaluates m with monotone floating-point steps, so the
// check is exact there; the frequency-domain engine gets a rounding margin.
inline bool bound_traces_monotone(const std::vector<BoundTraceRow>& rows,
                                  std::size_t length, ConvEngine engine) {
  const double rel = engine == ConvEngine::kFft ? 1e-9 : 0.0;
  for (std::size_t i = length; i < rows.size(); ++i) {
    const auto& prev = rows[i - length];
    const auto& cur = rows[i];
    const double slack_up = rel * std::max(1.0, std::abs(prev.m_up));
    const double slack_low = rel * std::max(1.0, std::abs(prev.m_low));
    if (cur.m_up > prev.m_up + slack_up) return false;
    if (cur.m_low < prev.m_low - slack_low) return false;
  }
  return true;
}

inline DemoRun run_demo(const Config& config,
                        std::optional<TraceTarget> target = std::nullopt) {
  DemoRun run;
  run.blocks = make_stack(config);
  if (target && (target->layer >= run.blocks.size() ||
                 target->channel >= config.ssm.channels))
    throw ConfigError("trace target outside the configured stack");
  const auto input = make_stack_input(config);
  const std::vector<Trace>* x = &input;
  run.outputs.reserve(run.blocks.size());
  for (std::size_t i = 0; i < run.blocks.size(); ++i) {
    BlockOptions o = block_options(config);
    if (target && target->layer == i) {
      o.observer = [&run, ch = target->channel](const IterationView& v) {
        if (v.channel != ch) return;
        for (std::size_t t = 0; t < v.k.size(); ++t)
          run.trace.push_back({v.iteration, t, v.k[t], v.m_upper[t], v.m_lower[t],
                               v.bounds.upper[t], v.bounds.lower[t]});
      };
    }
    run.outputs.push_back(block_forward(run.blocks[i], *x, o));
    x = &run.outputs.back().output;
  }
  if (target)
    run.trace_monotone =
        bound_traces_monotone(run.trace, config.ssm.length, config.bench.engine);
  return run;
}

inline Table bound_trace_table(const std::vector<BoundTraceRow>& rows) {
  Table t({"iteration", "t", "k", "m_up", "m_low", "s_up", "s_low"});
  for (const auto& r : rows)
    t.add_row({cell(r.iteration), cell(r.t + 1), cell(r.k), cell(r.m_up),
               cell(r.m_low), cell(static_cast<std::size_t>(r.s_up)),
               cell(static_cast<std::size_t>(r.s_low))});
  return t;
}

inline CommandResult demo_report(const Config& config, const DemoRun& run,
                                 std::optional<TraceTarget> target) {
  CommandResult out;
  out.ok = run.trace_monotone;
  out.table = Table({"layer", "spiking_rate", "fuzzy_rate", "norm_s", "ssm_s",
                     "activation_s", "mix_s"});
  Json layers = Json::array();
  for (std::size_t i = 0; i < run.outputs.size(); ++i) {
    const auto& s = run.outputs[i].stats;
    layers.push_back({{"layer", i},
                      {"spiking_rate", s.spiking_rate},
                      {"fuzzy_rate", s.fuzzy_rate},
                      {"channel_rates", s.channel_rates},
                      {"timing",
                       {{"norm_s", s.timing.norm},
                        {"ssm_s", s.timing.ssm},
                        {"activation_s", s.timing.activation},
                        {"mix_s", s.timing.mix}}},
                      {"warnings", run.outputs[i].warnings}});
    out.table.add_row({cell(i), cell(s.spiking_rate), cell(s.fuzzy_rate),
                       cell(s.timing.norm), cell(s.timing.ssm),
                       cell(s.timing.activation), cell(s.timing.mix)});
  }
  out.doc = {{"command", "demo"},
             {"seed", config.seed},
             {"neuron", neuron_json(config.neuron)},
             {"layers", layers}};
  if (target) {
    out.doc["bound_trace"] = {{"layer", target->layer},
                              {"channel", target->channel},
                              {"rows", run.trace.size()},
                              {"monotone", run.trace_monotone}};
  }
  return out;
}

inline CommandResult cmd_demo(const Config& config,
                              std::optional<TraceTarget> target = std::nullopt) {
  return demo_report(config, run_demo(config, target), target);
}

// ---------------------------------------------------------------- energy

// name:kind:ops[:rate], kind in {mac, ac}.
inline LayerOps parse_layer_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4)
    throw ConfigError("layer spec '" + spec + "' is not name:kind:ops[:rate]");
  LayerOps layer;
  layer.name = parts[0];
  if (parts[1] != "mac" && parts[1] != "ac")
    throw ConfigError("layer kind must be mac or ac in '" + spec + "'");
  layer.spike_input = parts[1] == "ac";
  try {
    std::size_t used = 0;
    layer.dense_ops = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    if (parts.size() == 4) {
      layer.spiking_rate = std::stod(parts[3], &used);
      if (used != parts[3].size()) throw std::invalid_argument(parts[3]);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("layer spec '" + spec + "' has a malformed number");
  }
  return layer;
}

inline CommandResult cmd_energy(const std::vector<LayerOps>& layers,
                                const EnergyModel& model,
                                const std::string& source) {
  const EnergyReport r = estimate_energy(layers, model);
  CommandResult out;
  out.table = Table({"layer", "name", "spiking_rate", "mac_ops", "ac_ops",
                     "energy_mac_j", "energy_ac_j"});
  Json list = Json::array();
  for (const auto& l : r.layers) {
    list.push_back({{"index", l.index},
                    {"name", l.name},
                    {"spiking_rate", l.spiking_rate},
                    {"mac_ops", l.mac_ops},
                    {"ac_ops", l.ac_ops},
                    {"energy_mac_j", l.energy_mac},
                    {"energy_ac_j", l.energy_ac}});
    out.table.add_row({cell(l.index), l.name, cell(l.spiking_rate),
                       cell(l.mac_ops), cell(l.ac_ops), cell(l.energy_mac),
                       cell(l.energy_ac)});
  }
  out.table.add_row({"total", "", "", cell(r.mac_ops), cell(r.ac_ops),
                     cell(r.energy_mac), cell(r.energy_ac)});
  out.doc = {{"command", "energy"},
             {"source", source},
             {"model", {{"e_mac_j", model.e_mac}, {"e_ac_j", model.e_ac}}},
             {"mac_ops", r.mac_ops},
             {"ac_ops", r.ac_ops},
             {"energy_mac_j", r.energy_mac},
             {"energy_ac_j", r.energy_ac},
             {"energy_mac_mj", r.energy_mac * 1e3},
             {"energy_ac_mj", r.energy_ac * 1e3},
             {"energy_total_j", r.energy_total()},
             {"layers", list}};
  return out;
}

// Op counts of the configured demo stack, with rates from an actual run.
inline std::vector<LayerOps> demo_layer_ops(const Config& config) {
  const DemoRun run = run_demo(config);
  std::vector<LayerStats> stats;
  for (const auto& o : run.outputs) stats.push_back(o.stats);
  return stack_ops(run.blocks, stats, config.ssm.length);
}

}  // namespace spikessm::harness
