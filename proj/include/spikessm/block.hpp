#pragma once

// Forward pass of one spiking SSM block:
//
//   x (D x L) -> [norm] -> per-channel SSM convolution y_c = K_c * x_c
//             -> spiking activation s_c = LIF(y_c)            (PMBC or serial)
//             -> position-wise GLU mix  z = W s_t + b,  out = z_a * sigmoid(z_g)
//             -> [residual: out += x, when D_out == D]
//
// W has shape (2 D_out) x D: rows [0, D_out) produce the value half z_a and
// rows [D_out, 2 D_out) the gate half z_g.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spikessm/error.hpp"
#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/parallel.hpp"
#include "spikessm/pmbc.hpp"
#include "spikessm/trace.hpp"

namespace spikessm {

enum class NormKind { kNone, kLayer, kBatch };

inline std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kNone: return "none";
    case NormKind::kLayer: return "layer";
    case NormKind::kBatch: return "batch";
  }
  return "unknown";
}

inline NormKind parse_norm_kind(std::string_view name) {
  if (name == "none") return NormKind::kNone;
  if (name == "layer") return NormKind::kLayer;
  if (name == "batch") return NormKind::kBatch;
  throw ParameterError("unknown norm kind '" + std::string(name) + "'");
}

enum class Activation { kPmbc, kSerial };

struct BlockParams {
  std::vector<SsmLayerParams> ssm;   // one per input channel
  std::vector<NeuronParams> neuron;  // one shared entry, or one per channel
  std::size_t out_channels = 0;
  std::vector<double> mix_weights;   // row-major (2 * out_channels) x D
  std::vector<double> mix_bias;      // 2 * out_channels
  NormKind norm = NormKind::kNone;
  bool residual = false;

  std::size_t channels() const noexcept { return ssm.size(); }

  const NeuronParams& neuron_for(std::size_t channel) const {
    return neuron.size() == 1 ? neuron.front() : neuron[channel];
  }

  double weight(std::size_t row, std::size_t col) const {
    return mix_weights[row * channels() + col];
  }

  // [I; I] mix with zero bias, so out = s * sigmoid(s).
  static std::vector<double> identity_mix(std::size_t channels) {
    std::vector<double> w(2 * channels * channels, 0.0);
    for (std::size_t i = 0; i < channels; ++i) {
      w[i * channels + i] = 1.0;
      w[(channels + i) * channels + i] = 1.0;
    }
    return w;
  }

  void validate() const {
    const std::size_t d = channels();
    if (d == 0) throw ShapeError("block needs at least one channel");
    if (out_channels == 0) throw ShapeError("block needs at least one output");
    if (neuron.size() != 1 && neuron.size() != d)
      throw ShapeError("neuron params must be shared or given per channel");
    if (mix_weights.size() != 2 * out_channels * d)
      throw ShapeError("mix weights must have shape (2 * D_out) x D = " +
                       std::to_string(2 * out_channels) + " x " +
                       std::to_string(d));
    if (mix_bias.size() != 2 * out_channels)
      throw ShapeError("mix bias must have length 2 * D_out");
    for (const auto& s : ssm) s.validate();
    for (const auto& n : neuron) n.validate();
    for (double w : mix_weights)
      if (!std::isfinite(w)) throw ParameterError("mix weights must be finite");
    for (double b : mix_bias)
      if (!std::isfinite(b)) throw ParameterError("mix bias must be finite");
  }
};

struct BlockOptions {
  std::size_t pmbc_iters = 3;
  FireMode mode = FireMode::kAllZero;
  ConvEngine engine = ConvEngine::kFft;
  Activation activation = Activation::kPmbc;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  IterationObserver observer;  // forwarded to the solver
};

struct StageTiming {
  double norm = 0.0;  // seconds
  double ssm = 0.0;
  double activation = 0.0;
  double mix = 0.0;
};

struct LayerStats {
  std::vector<double> channel_rates;
  double spiking_rate = 0.0;  // mean over channels
  double fuzzy_rate = 0.0;    // mean over channels; 0 for serial activation
  StageTiming timing;
};

struct BlockOutput {
  std::vector<SpikeTrain> spikes;  // D x L, input to the mix
  std::vector<Trace> output;       // D_out x L
  LayerStats stats;
  std::vector<std::string> warnings;
};

namespace detail {

inline constexpr double kNormEpsilon = 1e-5;

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Standardization with statistics taken from the input itself. Layer: over
// channels at each time step. Batch: over the length of each channel.
inline std::vector<Trace> normalize(const std::vector<Trace>& x, NormKind kind) {
  if (kind == NormKind::kNone) return x;
  const std::size_t d = x.size();
  const std::size_t length = x.front().size();
  std::vector<Trace> out = x;
  if (kind == NormKind::kBatch) {
    for (auto& channel : out) {
      double mean = 0.0;
      for (double v : channel) mean += v;
      mean /= static_cast<double>(length);
      double var = 0.0;
      for (double v : channel) var += (v - mean) * (v - mean);
      var /= static_cast<double>(length);
      const double scale = 1.0 / std::sqrt(var + kNormEpsilon);
      for (double& v : channel) v = (v - mean) * scale;
    }
    return out;
  }
  for (std::size_t t = 0; t < length; ++t) {
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += x[c][t];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (x[c][t] - mean) * (x[c][t] - mean);
    var /= static_cast<double>(d);
    const double scale = 1.0 / std::sqrt(var + kNormEpsilon);
    for (std::size_t c = 0; c < d; ++c) out[c][t] = (x[c][t] - mean) * scale;
  }
  return out;
}

inline bool shares_neuron(const BlockParams& params) {
  for (const auto& n : params.neuron)
    if (!(n == params.neuron.front())) return false;
  return true;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

inline BlockOutput block_forward(const BlockParams& params,
                                 const std::vector<Trace>& x,
                                 const BlockOptions& options = {}) {
  params.validate();
  const std::size_t d = params.channels();
  if (x.size() != d)
    throw ShapeError("block expects " + std::to_string(d) + " channels, got " +
                     std::to_string(x.size()));
  if (options.pmbc_iters == 0)
    throw ParameterError("PMBC needs at least one iteration");
  const std::size_t length = x.front().size();
  for (const auto& channel : x) {
    require_nonempty_finite(channel, "block input");
    if (channel.size() != length)
      throw ShapeError("block channels must share one length");
  }

  BlockOutput out;
  auto start = std::chrono::steady_clock::now();
  const std::vector<Trace> normed = detail::normalize(x, params.norm);
  out.stats.timing.norm = detail::seconds_since(start);

  start = std::chrono::steady_clock::now();
  std::vector<Trace> y(d);
  parallel_for(d, options.threads, [&](std::size_t c) {
    y[c] = causal_conv(normed[c], ssm_kernel(params.ssm[c], length));
  });
  out.stats.timing.ssm = detail::seconds_since(start);

  start = std::chrono::steady_clock::now();
  out.spikes.resize(d);
  std::vector<double> fuzzy(d, 0.0);
  if (options.activation == Activation::kSerial) {
    parallel_for(d, options.threads, [&](std::size_t c) {
      out.spikes[c] = serial_lif(params.neuron_for(c), y[c]).spikes;
    });
  } else {
    PmbcOptions solver;
    solver.max_iters = options.pmbc_iters;
    solver.mode = options.mode;
    solver.engine = options.engine;
    solver.seed = options.seed;
    solver.threads = options.threads;
    solver.observer = options.observer;
    if (detail::shares_neuron(params)) {
      auto results = pmbc_solve_batch(params.neuron.front(), y, solver);
      for (std::size_t c = 0; c < d; ++c) {
        fuzzy[c] = results[c].fuzzy_rate;
        out.spikes[c] = std::move(results[c].spikes);
      }
    } else {
      parallel_for(d, options.threads, [&](std::size_t c) {
        PmbcOptions local = solver;
        local.seed = detail::mix_seed(options.seed, c);
        if (solver.observer) {
          local.observer = [&solver, c](const IterationView& v) {
            solver.observer({c, v.iteration, v.k, v.m_upper, v.m_lower,
                             v.bounds});
          };
        }
        auto r = pmbc_solve(params.neuron[c], y[c], local);
        fuzzy[c] = r.fuzzy_rate;
        out.spikes[c] = std::move(r.spikes);
      });
    }
  }
  out.stats.timing.activation = detail::seconds_since(start);

  start = std::chrono::steady_clock::now();
  const std::size_t d_out = params.out_channels;
  out.output.assign(d_out, Trace(length));
  for (std::size_t o = 0; o < d_out; ++o) {
    for (std::size_t t = 0; t < length; ++t) {
      // Spikes are 0 or 1, so the projection only accumulates weights.
      double value = params.mix_bias[o];
      double gate = params.mix_bias[d_out + o];
      for (std::size_t c = 0; c < d; ++c) {
        if (out.spikes[c][t]) {
          value += params.weight(o, c);
          gate += params.weight(d_out + o, c);
        }
      }
      out.output[o][t] = value * detail::sigmoid(gate);
    }
  }
  if (params.residual) {
    if (d_out == d) {
      for (std::size_t o = 0; o < d_out; ++o)
        for (std::size_t t = 0; t < length; ++t) out.output[o][t] += x[o][t];
    } else {
      out.warnings.push_back("residual dropped: block maps " +
                             std::to_string(d) + " channels to " +
                             std::to_string(d_out));
    }
  }
  out.stats.timing.mix = detail::seconds_since(start);

  out.stats.channel_rates.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    out.stats.channel_rates[c] = out.spikes[c].rate();
    out.stats.spiking_rate += out.stats.channel_rates[c];
    out.stats.fuzzy_rate += fuzzy[c];
  }
  out.stats.spiking_rate /= static_cast<double>(d);
  out.stats.fuzzy_rate /= static_cast<double>(d);
  return out;
}

// Runs the blocks in order; the mixed output of block i is the input of
// block i + 1.
inline std::vector<BlockOutput> run_stack(const std::vector<BlockParams>& blocks,
                                          const std::vector<Trace>& x,
                                          const BlockOptions& options = {}) {
  if (blocks.empty()) throw ShapeError("stack needs at least one block");
  std::vector<BlockOutput> outputs;
  outputs.reserve(blocks.size());
  const std::vector<Trace>* input = &x;
  for (const auto& block : blocks) {
    outputs.push_back(block_forward(block, *input, options));
    input = &outputs.back().output;
  }
  return outputs;
}

inline std::vector<LayerStats> spiking_rate_profile(
    const std::vector<BlockParams>& blocks, const std::vector<Trace>& x,
    const BlockOptions& options = {}) {
  std::vector<LayerStats> stats;
  for (auto& out : run_stack(blocks, x, options))
    stats.push_back(std::move(out.stats));
  return stats;
}

}  // namespace spikessm
