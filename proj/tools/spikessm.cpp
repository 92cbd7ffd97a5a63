// spikessm: verification, benchmark, convergence, energy and demo runs.
//
// Exit codes: 0 success, 1 verification failure (or a failed run),
// 2 usage or configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikessm/harness/commands.hpp"
#include "spikessm/harness/config.hpp"
#include "spikessm/harness/report.hpp"

namespace {

using namespace spikessm;
using namespace spikessm::harness;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
  std::vector<std::size_t> lengths;
  std::size_t iters = 0;
  std::size_t channels = 0;
  std::size_t repeats = 0;
  std::size_t warmup = 0;
  std::size_t threads = 0;
  std::string fire_mode;
  std::string engine;
  double tau = 0, tau_r = 0, v_th = 0, u_th = 0;
};

struct Options {
  CLI::Option* seed;
  CLI::Option* lengths;
  CLI::Option* iters;
  CLI::Option* channels;
  CLI::Option* repeats;
  CLI::Option* warmup;
  CLI::Option* threads;
  CLI::Option* tau;
  CLI::Option* tau_r;
  CLI::Option* v_th;
  CLI::Option* u_th;
};

Options add_common(CLI::App& app, CommonFlags& f) {
  app.add_option("--config", f.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", f.out, "Write the report here instead of stdout");
  app.add_option("--fire-mode", f.fire_mode, "Policy for unresolved steps")
      ->check(CLI::IsMember({"allone", "allzero", "meanrate", "midpoint"}));
  app.add_option("--engine", f.engine, "PMBC convolution engine")
      ->check(CLI::IsMember({"fft", "recurrence"}));
  Options o;
  o.seed = app.add_option("--seed", f.seed, "RNG seed");
  o.lengths = app.add_option("--length", f.lengths, "Sequence lengths, comma separated")
                  ->delimiter(',')
                  ->check(CLI::PositiveNumber);
  o.iters = app.add_option("--iters", f.iters, "PMBC iteration budget")
                ->check(CLI::PositiveNumber);
  o.channels = app.add_option("--channels", f.channels, "Batched channels")
                   ->check(CLI::PositiveNumber);
  o.repeats = app.add_option("--repeats", f.repeats, "Timed repeats")
                  ->check(CLI::PositiveNumber);
  o.warmup = app.add_option("--warmup", f.warmup, "Discarded warmup runs");
  o.threads = app.add_option("--threads", f.threads, "Worker threads, 0 = all cores");
  o.tau = app.add_option("--tau", f.tau, "Membrane decay");
  o.tau_r = app.add_option("--tau-r", f.tau_r,
                           "Refractory decay; selects refractory reset");
  o.v_th = app.add_option("--v-th", f.v_th, "Firing threshold");
  o.u_th = app.add_option("--u-th", f.u_th, "Reset magnitude");
  return o;
}

Config resolve_config(const CommonFlags& f, const Options& o) {
  Config c = f.config_path.empty() ? Config{} : load_config(f.config_path);
  if (o.seed->count()) c.seed = f.seed;
  if (o.lengths->count()) c.bench.lengths = f.lengths;
  if (o.iters->count()) c.bench.iters = f.iters;
  if (o.channels->count()) c.bench.channels = f.channels;
  if (o.repeats->count()) c.bench.repeats = f.repeats;
  if (o.warmup->count()) c.bench.warmup = f.warmup;
  if (o.threads->count()) c.bench.threads = f.threads;
  if (!f.fire_mode.empty()) c.bench.fire_mode = parse_fire_mode(f.fire_mode);
  if (!f.engine.empty()) c.bench.engine = parse_conv_engine(f.engine);
  if (o.tau->count()) c.neuron.tau = f.tau;
  if (o.v_th->count()) c.neuron.v_th = f.v_th;
  if (o.u_th->count()) c.neuron.u_th = f.u_th;
  if (o.tau_r->count()) {
    c.neuron.tau_r = f.tau_r;
    c.neuron.reset_mode = ResetMode::kRefractory;
  }
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void write(const CommandResult& r, const CommonFlags& f) {
  emit(parse_format(f.format) == Format::kJson ? to_json_text(r.doc)
                                               : to_csv(r.table),
       f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel spike resolution for LIF neurons: verify, bench, "
               "converge, energy, demo"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  const Options opts = add_common(app, flags);

  auto* verify = app.add_subcommand("verify", "Run the oracle verification suites");
  double input_std = 1.0;
  verify->add_option("--input-std", input_std,
                     "Input stddev at the reported operating point");
  auto* bench = app.add_subcommand("bench", "PMBC vs serial throughput");
  auto* converge = app.add_subcommand("converge", "Explicit fraction per iteration budget");
  converge->add_option("--input-std", input_std, "Input standard deviation");

  auto* energy = app.add_subcommand("energy", "Operation-count energy estimate");
  std::vector<std::string> layer_specs;
  double e_mac = 0, e_ac = 0;
  energy->add_option("--layer", layer_specs, "Layer as name:mac|ac:ops[:rate]");
  auto* e_mac_opt = energy->add_option("--e-mac", e_mac, "Joules per MAC");
  auto* e_ac_opt = energy->add_option("--e-ac", e_ac, "Joules per AC");

  auto* demo = app.add_subcommand("demo", "Forward a block stack and report rates");
  std::string trace_out;
  std::size_t trace_layer = 0, trace_channel = 0;
  demo->add_option("--trace-out", trace_out, "CSV of per-round bound traces");
  demo->add_option("--trace-layer", trace_layer, "Layer of the traced neuron");
  demo->add_option("--trace-channel", trace_channel, "Channel of the traced neuron");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Config config;
  try {
    config = resolve_config(flags, opts);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    CommandResult result;
    if (*verify) {
      result = cmd_verify(config, input_std);
    } else if (*bench) {
      result = cmd_bench(config);
    } else if (*converge) {
      result = cmd_converge(config, input_std);
    } else if (*energy) {
      EnergyModel model = config.energy.model;
      if (e_mac_opt->count()) model.e_mac = e_mac;
      if (e_ac_opt->count()) model.e_ac = e_ac;
      std::vector<LayerOps> layers;
      std::string source;
      if (!layer_specs.empty()) {
        for (const auto& s : layer_specs) layers.push_back(parse_layer_spec(s));
        source = "flags";
      } else if (!config.energy.layers.empty()) {
        layers = config.energy.layers;
        source = "config";
      } else {
        layers = demo_layer_ops(config);
        source = "demo";
      }
      result = cmd_energy(layers, model, source);
    } else if (*demo) {
      std::optional<TraceTarget> target;
      if (!trace_out.empty()) target = TraceTarget{trace_layer, trace_channel};
      const DemoRun run = run_demo(config, target);
      result = demo_report(config, run, target);
      if (target) emit(to_csv(bound_trace_table(run.trace)), trace_out);
    }
    write(result, flags);
    if (!result.ok) {
      std::cerr << "verification failed\n";
      return kExitFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitOk;
}
