#pragma once

// Verification suites behind `spikessm verify`. Each suite draws its cases
// from one seeded stream, checks the library against the brute-force oracles
// and records the first few failures with enough context to replay them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spikessm/harness/oracles.hpp"
#include "spikessm/harness/workloads.hpp"
#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/pmbc.hpp"

namespace spikessm::harness {

struct CaseFailure {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::string params;
  std::size_t first_index = 0;  // first mismatching time step
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t passed = 0;
  double worst = 0.0;       // worst observed error metric
  double tolerance = 0.0;
  std::size_t resampled = 0;  // tie exclusions
  std::vector<CaseFailure> failures;

  bool ok() const noexcept { return cases > 0 && passed == cases; }
};

namespace detail {

inline constexpr std::size_t kMaxRecordedFailures = 8;

inline void record(SuiteResult& r, CaseFailure f) {
  if (r.failures.size() < kMaxRecordedFailures) r.failures.push_back(std::move(f));
}

inline std::string describe(const NeuronParams& p, std::size_t length) {
  std::ostringstream s;
  s.precision(17);
  s << to_string(p.reset_mode) << " tau=" << p.tau << " tau_r=" << p.tau_r
    << " v_th=" << p.v_th << " u_th=" << p.u_th << " L=" << length;
  return s.str();
}

inline double min_gap(const Decomposition& d) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < d.k.size(); ++t)
    gap = std::min(gap, std::abs(d.k[t] - d.m[t]));
  return gap;
}

inline std::size_t first_mismatch(const SpikeTrain& a, const SpikeTrain& b) {
  for (std::size_t t = 0; t < a.size(); ++t)
    if (a[t] != b[t]) return t;
  return a.size();
}

struct LifInstance {
  NeuronParams params;
  Trace input;
  LifOutput oracle;
  std::uint64_t seed;
};

// Draws params and a N(0, 1) input, resampling while any |k_t - m_t| falls
// below tie_gap so that strict and non-strict comparisons agree.
inline LifInstance draw_instance(std::uint64_t seed, std::size_t instance,
                                 ResetMode mode, std::size_t length,
                                 double tie_gap, std::size_t& resampled) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t case_seed =
        spikessm::detail::mix_seed(seed, (instance << 16) + attempt);
    Rng rng(case_seed);
    LifInstance c{random_neuron(rng, mode), gaussian_trace(rng, length), {},
                  case_seed};
    c.oracle = serial_lif(c.params, c.input);
    if (tie_gap <= 0.0 ||
        min_gap(decompose_sum(c.params, c.input, c.oracle.spikes)) >= tie_gap)
      return c;
    ++resampled;
  }
}

}  // namespace detail

inline constexpr double kTieGap = 1e-12;

// PMBC with max_iters = L settles every step and matches the serial oracle.
inline SuiteResult oracle_equivalence_suite(std::uint64_t seed,
                                            std::size_t instances,
                                            ConvEngine engine) {
  SuiteResult r;
  r.name = "oracle_equivalence_" + std::string(to_string(engine));
  r.tolerance = 0.0;
  const std::size_t lengths[] = {16, 64, 256};
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t length = lengths[i % 3];
    const ResetMode mode = (i / 3) % 2 ? ResetMode::kRefractory : ResetMode::kSoft;
    auto c = detail::draw_instance(seed, i, mode, length, kTieGap, r.resampled);
    PmbcOptions o;
    o.max_iters = length;
    o.engine = engine;
    const auto result = pmbc_solve(c.params, c.input, o);
    ++r.cases;
    const bool equal = result.spikes == c.oracle.spikes;
    r.worst = std::max(r.worst, result.fuzzy_rate);
    if (equal && result.fuzzy_rate == 0.0) {
      ++r.passed;
    } else {
      detail::record(r, {i, c.seed, detail::describe(c.params, length),
                         detail::first_mismatch(result.spikes, c.oracle.spikes),
                         "fuzzy_rate=" + std::to_string(result.fuzzy_rate)});
    }
  }
  return r;
}

// u = k - m + v_th against the serial membrane, relative to max(1, |k|, |m|).
inline SuiteResult decomposition_suite(std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  r.name = "decomposition_identity";
  r.tolerance = 1e-9;
  Rng lengths = make_rng(seed, 0x646563);
  std::uniform_int_distribution<std::size_t> length_dist(1, 256);
  std::size_t unused = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const ResetMode mode = i % 2 ? ResetMode::kRefractory : ResetMode::kSoft;
    const std::size_t length = length_dist(lengths);
    auto c = detail::draw_instance(seed ^ 0xdec0, i, mode, length, 0.0, unused);
    const auto d = decompose(c.params, c.input, c.oracle.spikes);
    double worst = 0.0;
    std::size_t worst_t = 0;
    for (std::size_t t = 0; t < length; ++t) {
      const double scale =
          std::max({1.0, std::abs(d.k[t]), std::abs(d.m[t])});
      const double err =
          std::abs(c.oracle.membrane[t] - (d.k[t] - d.m[t] + c.params.v_th)) /
          scale;
      if (err > worst) {
        worst = err;
        worst_t = t;
      }
    }
    ++r.cases;
    r.worst = std::max(r.worst, worst);
    if (worst <= r.tolerance)
      ++r.passed;
    else
      detail::record(r, {i, c.seed, detail::describe(c.params, length), worst_t,
                         "relative error " + std::to_string(worst)});
  }
  return r;
}

// Frequency-domain convolution against the direct sum.
inline SuiteResult fft_suite(std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  r.name = "fft_convolution";
  r.tolerance = 1e-8;
  const std::size_t lengths[] = {16, 64, 256, 1024, 4096};
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t length = lengths[i % 5];
    const std::uint64_t case_seed = spikessm::detail::mix_seed(seed ^ 0xff7, i);
    Rng rng(case_seed);
    const Trace signal = uniform_trace(rng, length, -1.0, 1.0);
    const Trace taps = uniform_trace(rng, length, -1.0, 1.0);
    const double err =
        max_abs_diff(causal_conv(signal, Kernel{taps}), direct_conv(signal, taps));
    ++r.cases;
    r.worst = std::max(r.worst, err);
    if (err <= r.tolerance)
      ++r.passed;
    else
      detail::record(r, {i, case_seed, "L=" + std::to_string(length), 0,
                         "max abs error " + std::to_string(err)});
  }
  return r;
}

// Convolution with the SSM kernel against the state recurrence.
inline SuiteResult ssm_suite(std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  r.name = "ssm_kernel_recurrence";
  r.tolerance = 1e-6;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t case_seed = spikessm::detail::mix_seed(seed ^ 0x55d, i);
    Rng rng(case_seed);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    const std::size_t length =
        std::uniform_int_distribution<std::size_t>(1, 128)(rng);
    const auto params = random_ssm(rng, n);
    const Trace input = gaussian_trace(rng, length);
    const Trace rec = ssm_recurrence(params, input);
    const Trace conv = causal_conv(input, ssm_kernel(params, length));
    const double err = max_abs_diff(conv, rec) / std::max(max_abs(rec), 1e-300);
    ++r.cases;
    r.worst = std::max(r.worst, err);
    if (err <= r.tolerance)
      ++r.passed;
    else
      detail::record(r, {i, case_seed,
                         "N=" + std::to_string(n) + " L=" + std::to_string(length),
                         0, "relative error " + std::to_string(err)});
  }
  return r;
}

// Closed-form refractory kernel against its defining double sum.
inline SuiteResult refractory_kernel_suite(std::uint64_t seed,
                                           std::size_t instances) {
  SuiteResult r;
  r.name = "refractory_kernel";
  r.tolerance = 1e-12;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t case_seed = spikessm::detail::mix_seed(seed ^ 0x4ef, i);
    Rng rng(case_seed);
    const double tau = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    // Every fourth case hits the tau = tau_r and tau_r = 0 special forms.
    double tau_r = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
    if (i % 4 == 1) tau_r = tau;
    if (i % 4 == 2) tau_r = 0.0;
    const std::size_t length =
        std::uniform_int_distribution<std::size_t>(1, 64)(rng);
    const double err = max_abs_diff(refractory_kernel(tau, tau_r, length).taps,
                                    refractory_kernel_sum(tau, tau_r, length));
    ++r.cases;
    r.worst = std::max(r.worst, err);
    if (err <= r.tolerance)
      ++r.passed;
    else
      detail::record(r, {i, case_seed, "tau=" + std::to_string(tau) +
                                           " tau_r=" + std::to_string(tau_r),
                         0, "max abs error " + std::to_string(err)});
  }
  return r;
}

// At every round: s_low <= s <= s_up against the oracle, bounds only
// tighten, and the explicit fraction never drops.
inline SuiteResult bound_soundness_suite(std::uint64_t seed, std::size_t instances,
                                         ConvEngine engine) {
  SuiteResult r;
  r.name = "bound_soundness_" + std::string(to_string(engine));
  Rng lengths = make_rng(seed, 0x626e64);
  std::uniform_int_distribution<std::size_t> length_dist(1, 128);
  for (std::size_t i = 0; i < instances; ++i) {
    const ResetMode mode = i % 2 ? ResetMode::kRefractory : ResetMode::kSoft;
    const std::size_t length = length_dist(lengths);
    auto c = detail::draw_instance(seed ^ 0xb0d, i, mode, length, kTieGap,
                                   r.resampled);
    const SpikeTrain& truth = c.oracle.spikes;
    BoundState previous = BoundState::initial(length);
    double previous_fraction = 0.0;
    std::string problem;
    std::size_t where = 0;
    PmbcOptions o;
    o.max_iters = length;
    o.engine = engine;
    o.observer = [&](const IterationView& v) {
      if (!problem.empty()) return;
      for (std::size_t t = 0; t < length; ++t) {
        const bool up = v.bounds.upper[t], low = v.bounds.lower[t];
        if (low > truth[t] || truth[t] > up) {
          problem = "bound excludes the true spike at round " +
                    std::to_string(v.iteration);
        } else if (up > previous.upper[t] || low < previous.lower[t]) {
          problem = "bound loosened at round " + std::to_string(v.iteration);
        }
        if (!problem.empty()) {
          where = t;
          return;
        }
      }
      const double fraction = explicit_fraction(v.bounds);
      if (fraction < previous_fraction)
        problem = "explicit fraction dropped at round " +
                  std::to_string(v.iteration);
      previous_fraction = fraction;
      previous = v.bounds;
    };
    pmbc_solve(c.params, c.input, o);
    ++r.cases;
    if (problem.empty())
      ++r.passed;
    else
      detail::record(r, {i, c.seed, detail::describe(c.params, length), where,
                         problem});
  }
  return r;
}

// Mean explicit fraction and fuzzy rate of PMBC at one operating point.
struct OperatingPoint {
  std::size_t length = 0;
  std::size_t channels = 0;
  std::size_t iters = 0;
  double explicit_fraction = 0.0;
  double fuzzy_rate = 0.0;
  double spiking_rate = 0.0;
};

inline OperatingPoint operating_point(const NeuronParams& params,
                                      std::size_t length, std::size_t channels,
                                      std::size_t iters, std::uint64_t seed,
                                      double input_stddev = 1.0,
                                      ConvEngine engine = ConvEngine::kRecurrence) {
  Rng rng = make_rng(seed, 0x6f70);
  const auto inputs = gaussian_batch(rng, channels, length, input_stddev);
  PmbcOptions o;
  o.max_iters = iters;
  o.engine = engine;
  o.seed = seed;
  const auto results = pmbc_solve_batch(params, inputs, o);
  OperatingPoint p{length, channels, iters};
  for (const auto& res : results) {
    p.explicit_fraction += 1.0 - res.fuzzy_rate;
    p.fuzzy_rate += res.fuzzy_rate;
    p.spiking_rate += res.spikes.rate();
  }
  const double n = static_cast<double>(channels);
  p.explicit_fraction /= n;
  p.fuzzy_rate /= n;
  p.spiking_rate /= n;
  return p;
}

}  // namespace spikessm::harness
