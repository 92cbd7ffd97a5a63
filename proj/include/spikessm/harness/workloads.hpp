#pragma once

// Seeded input generators and block stacks built from a harness config. All
// randomness comes from std::mt19937_64 streams derived from one seed.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "spikessm/block.hpp"
#include "spikessm/harness/config.hpp"
#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"
#include "spikessm/trace.hpp"

namespace spikessm::harness {

using Rng = std::mt19937_64;

// Independent stream for one purpose of one run.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(spikessm::detail::mix_seed(seed, stream));
}

inline Trace gaussian_trace(Rng& rng, std::size_t length, double mean = 0.0,
                            double stddev = 1.0) {
  std::normal_distribution<double> dist(mean, stddev);
  Trace t(length);
  for (auto& v : t) v = dist(rng);
  return t;
}

inline Trace uniform_trace(Rng& rng, std::size_t length, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Trace t(length);
  for (auto& v : t) v = dist(rng);
  return t;
}

inline std::vector<Trace> gaussian_batch(Rng& rng, std::size_t channels,
                                         std::size_t length, double stddev = 1.0) {
  std::vector<Trace> batch;
  batch.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c)
    batch.push_back(gaussian_trace(rng, length, 0.0, stddev));
  return batch;
}

// tau ~ U(0.05, 0.95), tau_r ~ U(0, 0.95), v_th ~ U(0.5, 2), U_th ~ U(0, 2).
inline NeuronParams random_neuron(Rng& rng, ResetMode mode) {
  std::uniform_real_distribution<double> tau(0.05, 0.95);
  std::uniform_real_distribution<double> tau_r(0.0, 0.95);
  std::uniform_real_distribution<double> v_th(0.5, 2.0);
  std::uniform_real_distribution<double> u_th(0.0, 2.0);
  NeuronParams p;
  p.reset_mode = mode;
  p.tau = tau(rng);
  p.tau_r = mode == ResetMode::kRefractory ? tau_r(rng) : 0.0;
  p.v_th = v_th(rng);
  p.u_th = u_th(rng);
  return p;
}

// Re(a) ~ U(-2, -0.1), Im(a) ~ U(-pi N, pi N), b, c ~ complex N(0, 1),
// delta ~ U(0.001, 0.1).
inline SsmLayerParams random_ssm(Rng& rng, std::size_t state_size) {
  std::uniform_real_distribution<double> re(-2.0, -0.1);
  const double span = std::numbers::pi * static_cast<double>(state_size);
  std::uniform_real_distribution<double> im(-span, span);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> delta(0.001, 0.1);
  SsmLayerParams p;
  p.delta = delta(rng);
  for (std::size_t n = 0; n < state_size; ++n) {
    p.a.emplace_back(re(rng), im(rng));
    p.b.emplace_back(gauss(rng), gauss(rng));
    p.c.emplace_back(gauss(rng), gauss(rng));
  }
  return p;
}

// Block i maps ssm.channels -> ssm.channels with S4D-Lin SSMs and the
// configured neuron.
inline std::vector<BlockParams> make_stack(const Config& config) {
  const auto& s = config.ssm;
  Rng rng = make_rng(config.seed, 0x6d6978);
  std::normal_distribution<double> weight(
      0.0, s.mix_scale / std::sqrt(static_cast<double>(s.channels)));
  std::vector<BlockParams> blocks(s.layers);
  for (auto& b : blocks) {
    b.ssm.assign(s.channels, SsmLayerParams::s4d_lin(s.state_size, s.delta));
    b.neuron = {config.neuron};
    b.out_channels = s.channels;
    b.norm = s.norm;
    b.residual = s.residual;
    b.mix_bias.assign(2 * s.channels, 0.0);
    if (s.mix == MixInit::kIdentity) {
      b.mix_weights = BlockParams::identity_mix(s.channels);
    } else {
      b.mix_weights.resize(2 * s.channels * s.channels);
      for (auto& w : b.mix_weights) w = weight(rng);
    }
  }
  return blocks;
}

inline std::vector<Trace> make_stack_input(const Config& config) {
  Rng rng = make_rng(config.seed, 0x696e);
  return gaussian_batch(rng, config.ssm.channels, config.ssm.length,
                        config.ssm.input_scale);
}

inline BlockOptions block_options(const Config& config) {
  BlockOptions o;
  o.pmbc_iters = config.bench.iters;
  o.mode = config.bench.fire_mode;
  o.engine = config.bench.engine;
  o.seed = config.seed;
  o.threads = config.bench.threads;
  return o;
}

}  // namespace spikessm::harness
