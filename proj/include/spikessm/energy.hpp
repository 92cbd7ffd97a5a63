#pragma once

// Operation-count energy estimate. Layers fed by real-valued activations pay
// a multiply-accumulate per dense operation; layers fed by binary spikes only
// accumulate the weights of the inputs that fired, so their dense count is
// scaled by the spiking rate and charged at the accumulate cost.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spikessm/block.hpp"
#include "spikessm/error.hpp"

namespace spikessm {

struct EnergyModel {
  double e_mac = 4.6e-12;  // joules per multiply-accumulate
  double e_ac = 0.9e-12;   // joules per accumulate

  void validate() const {
    if (!std::isfinite(e_mac) || !(e_mac > 0.0))
      throw ParameterError("e_mac must be positive");
    if (!std::isfinite(e_ac) || !(e_ac > 0.0))
      throw ParameterError("e_ac must be positive");
  }
};

struct LayerOps {
  std::string name;
  double dense_ops = 0.0;     // operations of the layer with dense input
  bool spike_input = false;   // true: AC layer scaled by spiking_rate
  double spiking_rate = 1.0;  // used only when spike_input
};

struct LayerEnergy {
  std::size_t index = 0;
  std::string name;
  double spiking_rate = 0.0;
  double mac_ops = 0.0;
  double ac_ops = 0.0;
  double energy_mac = 0.0;  // joules
  double energy_ac = 0.0;
};

struct EnergyReport {
  double mac_ops = 0.0;
  double ac_ops = 0.0;
  double energy_mac = 0.0;  // joules
  double energy_ac = 0.0;
  std::vector<LayerEnergy> layers;

  double energy_total() const noexcept { return energy_mac + energy_ac; }
};

inline EnergyReport estimate_energy(const std::vector<LayerOps>& layers,
                                    const EnergyModel& model = {}) {
  model.validate();
  EnergyReport report;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerOps& layer = layers[i];
    if (!std::isfinite(layer.dense_ops) || layer.dense_ops < 0.0)
      throw ParameterError("layer '" + layer.name +
                           "' has a negative or non-finite op count");
    LayerEnergy e;
    e.index = i;
    e.name = layer.name;
    if (layer.spike_input) {
      if (!std::isfinite(layer.spiking_rate) || layer.spiking_rate < 0.0 ||
          layer.spiking_rate > 1.0)
        throw ParameterError("layer '" + layer.name +
                           "' has a spiking rate outside [0, 1]");
      e.spiking_rate = layer.spiking_rate;
      e.ac_ops = layer.dense_ops * layer.spiking_rate;
    } else {
      e.spiking_rate = 1.0;
      e.mac_ops = layer.dense_ops;
    }
    e.energy_mac = e.mac_ops * model.e_mac;
    e.energy_ac = e.ac_ops * model.e_ac;
    report.mac_ops += e.mac_ops;
    report.ac_ops += e.ac_ops;
    report.layers.push_back(std::move(e));
  }
  report.energy_mac = report.mac_ops * model.e_mac;
  report.energy_ac = report.ac_ops * model.e_ac;
  return report;
}

// Real multiply-accumulates of one diagonal complex SSM evaluated by
// recurrence: h = a_bar h + b_bar x (4 + 2) and y += Re(c h) (2), per mode
// and step.
inline double ssm_dense_ops(const BlockParams& block, std::size_t length) {
  double ops = 0.0;
  for (const auto& s : block.ssm)
    ops += 8.0 * static_cast<double>(s.state_size()) * static_cast<double>(length);
  return ops;
}

// Dense operations of the position-wise (2 D_out) x D projection.
inline double mix_dense_ops(const BlockParams& block, std::size_t length) {
  return 2.0 * static_cast<double>(block.out_channels) *
         static_cast<double>(block.channels()) * static_cast<double>(length);
}

// Op counts of a block stack run: every SSM sees real-valued input (MAC) and
// every mix sees the block's spikes (AC at the block's spiking rate).
inline std::vector<LayerOps> stack_ops(const std::vector<BlockParams>& blocks,
                                       const std::vector<LayerStats>& stats,
                                       std::size_t length) {
  if (blocks.size() != stats.size())
    throw ShapeError("one stats entry per block is required");
  std::vector<LayerOps> ops;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i);
    ops.push_back({prefix + ".ssm", ssm_dense_ops(blocks[i], length), false, 1.0});
    ops.push_back({prefix + ".mix", mix_dense_ops(blocks[i], length), true,
                   stats[i].spiking_rate});
  }
  return ops;
}

}  // namespace spikessm
