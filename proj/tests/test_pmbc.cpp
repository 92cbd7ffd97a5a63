#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"
#include "support/oracles.hpp"

using namespace spikessm;

namespace {

constexpr ConvEngine kEngines[] = {ConvEngine::kFft, ConvEngine::kRecurrence};

struct Case {
  NeuronParams params;
  Trace input;
};

// Random neuron and Gaussian drive; redrawn while any |k_t - m_t| on the
// serial trajectory falls within the tie gap.
Case draw_case(std::mt19937_64& rng, ResetMode mode, std::size_t length) {
  std::uniform_real_distribution<double> tau(0.05, 0.95), tau_r(0.0, 0.95),
      v_th(0.5, 2.0), u_th(0.0, 2.0);
  std::normal_distribution<double> gauss;
  while (true) {
    Case c;
    c.params.reset_mode = mode;
    c.params.tau = tau(rng);
    c.params.tau_r = mode == ResetMode::kRefractory ? tau_r(rng) : 0.0;
    c.params.v_th = v_th(rng);
    c.params.u_th = u_th(rng);
    oracle::Vec x(length);
    for (auto& v : x) v = gauss(rng);
    const oracle::Lif ref{c.params.tau, c.params.tau_r, c.params.v_th, c.params.u_th,
                          mode == ResetMode::kRefractory};
    const auto run = oracle::simulate(ref, x);
    const auto [k, m] = oracle::split(ref, x, run.s);
    if (oracle::min_gap(k, m) < 1e-12) continue;
    c.input = Trace(x);
    return c;
  }
}

PmbcOptions opts(std::size_t iters, ConvEngine engine, FireMode mode = FireMode::kAllZero) {
  PmbcOptions o;
  o.max_iters = iters;
  o.engine = engine;
  o.mode = mode;
  return o;
}

class PerEngine : public ::testing::TestWithParam<ConvEngine> {};

}  // namespace

TEST_P(PerEngine, HandExampleResolvesFully) {
  const Trace in{1.2, 0.8, 0.1, 1.0};
  for (auto mode : {FireMode::kAllOne, FireMode::kAllZero, FireMode::kMeanRate,
                    FireMode::kMidpoint}) {
    const auto r = pmbc_solve(NeuronParams::soft(0.5, 1.0, 1.0), in,
                              opts(4, GetParam(), mode));
    EXPECT_EQ(r.spikes, (SpikeTrain{1, 0, 0, 1})) << to_string(mode);
    EXPECT_EQ(r.fuzzy_rate, 0.0);
  }
}

TEST_P(PerEngine, ZeroInputSettlesInOneRound) {
  const auto r = pmbc_solve(NeuronParams::soft(0.5, 1.0, 1.0), Trace(32),
                            opts(5, GetParam()));
  EXPECT_EQ(r.spikes, SpikeTrain(32));
  EXPECT_EQ(r.fuzzy_rate, 0.0);
  EXPECT_EQ(r.bounds.iterations_run, 1u);
}

TEST_P(PerEngine, GaussianOperatingPointMostlyExplicit) {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss;
  Trace in(1024);
  for (auto& v : in) v = gauss(rng);
  const auto r = pmbc_solve(NeuronParams::soft(0.1, 1.0, 1.0), in, opts(3, GetParam()));
  EXPECT_GE(1.0 - r.fuzzy_rate, 0.95);
}

TEST_P(PerEngine, MatchesSerialWithFullBudget) {
  std::mt19937_64 rng(202);
  const std::size_t lengths[] = {16, 64, 256};
  for (int i = 0; i < 300; ++i) {
    const auto mode = i % 2 ? ResetMode::kRefractory : ResetMode::kSoft;
    const std::size_t n = lengths[i % 3];
    const auto c = draw_case(rng, mode, n);
    const auto r = pmbc_solve(c.params, c.input, opts(n, GetParam()));
    ASSERT_EQ(r.fuzzy_rate, 0.0) << "instance " << i;
    ASSERT_EQ(r.spikes, serial_lif(c.params, c.input).spikes) << "instance " << i;
  }
}

TEST_P(PerEngine, BoundsContainTruthEveryRound) {
  std::mt19937_64 rng(303);
  for (int i = 0; i < 100; ++i) {
    const auto mode = i % 2 ? ResetMode::kRefractory : ResetMode::kSoft;
    const auto c = draw_case(rng, mode, 1 + rng() % 128);
    const auto truth = serial_lif(c.params, c.input).spikes;
    auto o = opts(c.input.size(), GetParam());
    std::size_t rounds = 0;
    o.observer = [&](const IterationView& v) {
      ++rounds;
      ASSERT_TRUE(v.bounds.consistent());
      for (std::size_t t = 0; t < truth.size(); ++t) {
        ASSERT_LE(v.bounds.lower[t], truth[t]) << "t " << t << " round " << v.iteration;
        ASSERT_GE(v.bounds.upper[t], truth[t]) << "t " << t << " round " << v.iteration;
      }
    };
    const auto r = pmbc_solve(c.params, c.input, o);
    EXPECT_EQ(rounds, r.bounds.iterations_run);
  }
}

TEST_P(PerEngine, TighteningIsMonotone) {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 100; ++i) {
    const auto c = draw_case(rng, i % 2 ? ResetMode::kRefractory : ResetMode::kSoft, 200);
    auto o = opts(200, GetParam());
    BoundState prev = BoundState::initial(200);
    o.observer = [&](const IterationView& v) {
      for (std::size_t t = 0; t < 200; ++t) {
        if (prev.lower[t]) {
          ASSERT_TRUE(v.bounds.lower[t]);
        }
        if (!prev.upper[t]) {
          ASSERT_FALSE(v.bounds.upper[t]);
        }
      }
      prev = v.bounds;
    };
    const auto r = pmbc_solve(c.params, c.input, o);
    for (std::size_t j = 1; j < r.explicit_history.size(); ++j)
      ASSERT_GE(r.explicit_history[j], r.explicit_history[j - 1]);
  }
}

TEST_P(PerEngine, EarlyStopMatchesLongerBudget) {
  std::mt19937_64 rng(505);
  for (int i = 0; i < 100; ++i) {
    const auto c = draw_case(rng, i % 2 ? ResetMode::kRefractory : ResetMode::kSoft, 128);
    const auto full = pmbc_solve(c.params, c.input, opts(128, GetParam()));
    const std::size_t used = full.bounds.iterations_run;
    const auto exact = pmbc_solve(c.params, c.input, opts(used, GetParam()));
    const auto extra = pmbc_solve(c.params, c.input, opts(used + 10, GetParam()));
    EXPECT_EQ(exact.bounds.upper, full.bounds.upper);
    EXPECT_EQ(exact.bounds.lower, full.bounds.lower);
    EXPECT_EQ(extra.bounds.upper, full.bounds.upper);
    EXPECT_EQ(extra.bounds.lower, full.bounds.lower);
  }
}

TEST_P(PerEngine, ShorterBudgetIsPrefixOfLonger) {
  std::mt19937_64 rng(606);
  const auto c = draw_case(rng, ResetMode::kRefractory, 512);
  const auto long_run = pmbc_solve(c.params, c.input, opts(6, GetParam()));
  for (std::size_t b = 1; b <= long_run.explicit_history.size(); ++b) {
    const auto r = pmbc_solve(c.params, c.input, opts(b, GetParam()));
    EXPECT_EQ(r.explicit_history.back(), long_run.explicit_history[b - 1]);
  }
}

TEST_P(PerEngine, AllZeroNeverExceedsAllOne) {
  std::mt19937_64 rng(707);
  for (int i = 0; i < 100; ++i) {
    const auto c = draw_case(rng, ResetMode::kSoft, 256);
    const auto zero = pmbc_solve(c.params, c.input, opts(1, GetParam(), FireMode::kAllZero));
    const auto one = pmbc_solve(c.params, c.input, opts(1, GetParam(), FireMode::kAllOne));
    EXPECT_LE(zero.spikes.rate(), one.spikes.rate());
    for (std::size_t t = 0; t < 256; ++t) EXPECT_LE(zero.spikes[t], one.spikes[t]);
  }
}

TEST_P(PerEngine, SpikesAgreeWithDefiniteBounds) {
  std::mt19937_64 rng(808);
  for (auto mode : {FireMode::kAllOne, FireMode::kAllZero, FireMode::kMeanRate,
                    FireMode::kMidpoint}) {
    const auto c = draw_case(rng, ResetMode::kRefractory, 300);
    const auto r = pmbc_solve(c.params, c.input, opts(2, GetParam(), mode));
    EXPECT_GE(r.fuzzy_rate, 0.0);
    EXPECT_LE(r.fuzzy_rate, 1.0);
    for (std::size_t t = 0; t < 300; ++t)
      if (!r.bounds.fuzzy(t)) {
        EXPECT_EQ(r.spikes[t], r.bounds.lower[t]);
      }
  }
}

TEST_P(PerEngine, BatchIndependentOfThreadCount) {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> gauss;
  std::vector<Trace> inputs(21, Trace(300));
  for (auto& in : inputs)
    for (auto& v : in) v = gauss(rng);
  const auto params = NeuronParams::refractory(0.4, 0.3, 1.0, 0.8);
  auto o = opts(3, GetParam(), FireMode::kMeanRate);
  o.seed = 77;
  o.threads = 1;
  const auto one = pmbc_solve_batch(params, inputs, o);
  o.threads = 4;
  const auto four = pmbc_solve_batch(params, inputs, o);
  ASSERT_EQ(one.size(), inputs.size());
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    EXPECT_EQ(one[c].spikes, four[c].spikes);
    EXPECT_EQ(one[c].explicit_history, four[c].explicit_history);
  }
}

TEST_P(PerEngine, BatchMatchesSingleSolves) {
  std::mt19937_64 rng(1010);
  std::normal_distribution<double> gauss;
  std::vector<Trace> inputs(11, Trace(100));
  for (auto& in : inputs)
    for (auto& v : in) v = gauss(rng);
  const auto params = NeuronParams::soft(0.2, 1.0, 1.0);
  const auto o = opts(3, GetParam());
  const auto batch = pmbc_solve_batch(params, inputs, o);
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    const auto single = pmbc_solve(params, inputs[c], o);
    EXPECT_EQ(batch[c].spikes, single.spikes);
    EXPECT_EQ(batch[c].bounds.upper, single.bounds.upper);
  }
}

INSTANTIATE_TEST_SUITE_P(Engines, PerEngine, ::testing::ValuesIn(kEngines),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(PmbcEngines, AgreeOnBoundsEveryRound) {
  std::mt19937_64 rng(1111);
  for (int i = 0; i < 200; ++i) {
    const auto c = draw_case(rng, i % 2 ? ResetMode::kRefractory : ResetMode::kSoft,
                             1 + rng() % 256);
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto a = pmbc_solve(c.params, c.input, opts(m, ConvEngine::kFft));
      const auto b = pmbc_solve(c.params, c.input, opts(m, ConvEngine::kRecurrence));
      ASSERT_EQ(a.bounds.upper, b.bounds.upper) << "instance " << i << " budget " << m;
      ASSERT_EQ(a.bounds.lower, b.bounds.lower) << "instance " << i << " budget " << m;
    }
  }
}

TEST(PmbcSolve, RejectsUnsupportedInput) {
  const Trace in{1.0, 0.5};
  EXPECT_THROW(pmbc_solve(NeuronParams::hard(0.5, 1.0), in), UnsupportedModeError);
  EXPECT_THROW(pmbc_solve(NeuronParams::no_reset(0.5, 1.0), in), UnsupportedModeError);
  EXPECT_THROW(pmbc_solve(NeuronParams::soft(0.5, 1.0, 1.0), in, 0, FireMode::kAllZero),
               ParameterError);
  EXPECT_THROW(pmbc_solve(NeuronParams::soft(0.5, 1.0, 1.0), Trace{}), DomainError);
  const std::vector<Trace> ragged{Trace(4), Trace(5)};
  EXPECT_THROW(pmbc_solve_batch(NeuronParams::soft(0.5, 1.0, 1.0), ragged), ShapeError);
}

TEST(ResolveFuzzy, FillPolicies) {
  BoundState b{SpikeTrain{1, 1, 1}, SpikeTrain{1, 0, 0}, 1};
  EXPECT_EQ(resolve_fuzzy(b, {}, {}, {}, FireMode::kAllOne), (SpikeTrain{1, 1, 1}));
  EXPECT_EQ(resolve_fuzzy(b, {}, {}, {}, FireMode::kAllZero), (SpikeTrain{1, 0, 0}));
  // Only one definite step and it fired, so p = 1.
  EXPECT_EQ(resolve_fuzzy(b, {}, {}, {}, FireMode::kMeanRate, 5), (SpikeTrain{1, 1, 1}));
  const std::vector<double> k{0.0, 2.0, 1.0}, up{0.0, 2.5, 2.5}, low{0.0, 1.0, 1.0};
  EXPECT_EQ(resolve_fuzzy(b, k, up, low, FireMode::kMidpoint), (SpikeTrain{1, 1, 0}));
}

TEST(ResolveFuzzy, NoFuzzyStepsKeepLowerBound) {
  BoundState b{SpikeTrain{1, 0, 1, 0}, SpikeTrain{1, 0, 1, 0}, 2};
  const std::vector<double> z(4, 0.0);
  for (auto mode : {FireMode::kAllOne, FireMode::kAllZero, FireMode::kMeanRate,
                    FireMode::kMidpoint})
    EXPECT_EQ(resolve_fuzzy(b, z, z, z, mode), b.lower);
}

TEST(ResolveFuzzy, MeanRateIsSeeded) {
  BoundState b = BoundState::initial(400);
  for (std::size_t t = 0; t < 100; ++t) {
    b.lower.set(t, t % 2 == 0);
    b.upper.set(t, t % 2 == 0);
  }
  const auto a = resolve_fuzzy(b, {}, {}, {}, FireMode::kMeanRate, 9);
  EXPECT_EQ(a, resolve_fuzzy(b, {}, {}, {}, FireMode::kMeanRate, 9));
  std::size_t fired = 0;
  for (std::size_t t = 100; t < 400; ++t) fired += a[t];
  EXPECT_NEAR(fired / 300.0, 0.5, 0.1);
}

TEST(ResolveFuzzy, RejectsInconsistentBounds) {
  BoundState b{SpikeTrain{0, 1}, SpikeTrain{1, 0}, 0};
  EXPECT_THROW(resolve_fuzzy(b, {}, {}, {}, FireMode::kAllZero), InvariantError);
  BoundState ok = BoundState::initial(2);
  EXPECT_THROW(resolve_fuzzy(ok, {}, {}, {}, FireMode::kMidpoint), ShapeError);
}

TEST(ExplicitFraction, Counting) {
  EXPECT_EQ(explicit_fraction(BoundState::initial(10)), 0.0);
  EXPECT_EQ(explicit_fraction({SpikeTrain{1, 0, 1}, SpikeTrain{1, 0, 1}, 3}), 1.0);
  EXPECT_EQ(explicit_fraction({SpikeTrain{1, 1, 0, 1}, SpikeTrain{1, 0, 0, 1}, 1}), 0.75);
}
