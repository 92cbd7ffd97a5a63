#include <gtest/gtest.h>

#include <cmath>

#include "spikessm/energy.hpp"

using namespace spikessm;

TEST(Energy, DenseMacLayer) {
  const auto r = estimate_energy({{"ann", 275e9, false, 1.0}});
  EXPECT_DOUBLE_EQ(r.mac_ops, 275e9);
  EXPECT_NEAR(r.energy_mac * 1e3, 1265.0, 1265.0 * 1e-3);
  EXPECT_EQ(r.ac_ops, 0.0);
}

TEST(Energy, SpikeDrivenAcLayer) {
  const auto r = estimate_energy({{"snn", 72.66e9, true, 1.0}});
  EXPECT_NEAR(r.energy_ac * 1e3, 65.394, 1e-9);
  EXPECT_NEAR(r.energy_ac * 1e3, 65.40, 65.40 * 1e-3);
}

TEST(Energy, TextPairIsSelfConsistent) {
  const auto r = estimate_energy({{"snn", 67.42e9, true, 1.0}});
  EXPECT_NEAR(r.energy_ac * 1e3, 60.68, 60.68 * 1e-3);
}

TEST(Energy, ZeroOpsZeroEnergy) {
  const auto r = estimate_energy({{"a", 0.0, false, 1.0}, {"b", 0.0, true, 0.3}});
  EXPECT_EQ(r.energy_total(), 0.0);
  EXPECT_EQ(estimate_energy({}).energy_total(), 0.0);
}

TEST(Energy, AcOpsScaleWithRateAndSumExactly) {
  const EnergyModel model{2e-12, 0.5e-12};
  const auto r = estimate_energy(
      {{"ssm", 1000.0, false, 1.0}, {"mix", 800.0, true, 0.25}, {"mix2", 40.0, true, 0.5}},
      model);
  ASSERT_EQ(r.layers.size(), 3u);
  EXPECT_EQ(r.layers[1].ac_ops, 200.0);
  EXPECT_EQ(r.layers[1].spiking_rate, 0.25);
  EXPECT_EQ(r.ac_ops, 220.0);
  EXPECT_EQ(r.energy_mac, r.mac_ops * model.e_mac);
  EXPECT_EQ(r.energy_ac, r.ac_ops * model.e_ac);
  EXPECT_EQ(r.energy_total(), r.energy_mac + r.energy_ac);
}

TEST(Energy, RejectsInvalidInputs) {
  EXPECT_THROW(estimate_energy({{"x", 1.0, true, 1.5}}), ParameterError);
  EXPECT_THROW(estimate_energy({{"x", 1.0, true, -0.1}}), ParameterError);
  EXPECT_THROW(estimate_energy({{"x", -1.0, false, 1.0}}), ParameterError);
  EXPECT_THROW(estimate_energy({}, EnergyModel{0.0, 1e-12}), ParameterError);
  EXPECT_THROW(estimate_energy({}, EnergyModel{1e-12, -1.0}), ParameterError);
}

TEST(Energy, StackOpsCountsEachBlock) {
  BlockParams b;
  b.ssm.assign(3, SsmLayerParams::s4d_lin(4, 0.1));
  b.out_channels = 2;
  LayerStats s;
  s.spiking_rate = 0.1;
  const auto ops = stack_ops({b}, {s}, 10);
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_EQ(ops[0].dense_ops, 8.0 * 4 * 10 * 3);
  EXPECT_FALSE(ops[0].spike_input);
  EXPECT_EQ(ops[1].dense_ops, 2.0 * 2 * 3 * 10);
  EXPECT_TRUE(ops[1].spike_input);
  EXPECT_EQ(ops[1].spiking_rate, 0.1);
  EXPECT_THROW(stack_ops({b}, {}, 10), ShapeError);
}
