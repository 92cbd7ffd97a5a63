#pragma once

// Parallel max-min boundary compression (PMBC).
//
// For soft and refractory reset the membrane potential splits into
//   u_t = k_t - m_t + v_th,   k = p * I,   m = U_th * (q * shift(s)) + v_th
// where p is the exponential kernel, q the reset kernel (q = p for soft
// reset) and shift delays the spike train by one step. k is independent of
// the spikes and m is nondecreasing in every spike, so an all-ones spike train
// gives an upper bound m_up and an all-zeros train a lower bound m_low on the
// true m. Comparing k against both bounds settles every time step with
// k > m_up (spike) or k < m_low (silent); the settled steps then tighten the
// bounds for the next round. Every round evaluates all time steps at once.
//
// Two engines evaluate the linear maps p* and q*:
//   kFft         one frequency-domain kernel transform per solve; the upper
//                and lower spike trains share one complex transform per round.
//   kRecurrence  the same maps as first- and second-order linear recurrences,
//                with blocks of channels processed side by side and several
//                rounds fused into one sweep over time (see below).
// Both engines produce the same bound sequence up to rounding of m.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <type_traits>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "spikessm/error.hpp"
#include "spikessm/fft.hpp"
#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/parallel.hpp"
#include "spikessm/trace.hpp"

namespace spikessm {

// Policy for time steps still unresolved after the iteration budget.
enum class FireMode { kAllOne, kAllZero, kMeanRate, kMidpoint };

inline std::string_view to_string(FireMode mode) {
  switch (mode) {
    case FireMode::kAllOne: return "allone";
    case FireMode::kAllZero: return "allzero";
    case FireMode::kMeanRate: return "meanrate";
    case FireMode::kMidpoint: return "midpoint";
  }
  return "unknown";
}

inline FireMode parse_fire_mode(std::string_view name) {
  if (name == "allone") return FireMode::kAllOne;
  if (name == "allzero") return FireMode::kAllZero;
  if (name == "meanrate") return FireMode::kMeanRate;
  if (name == "midpoint") return FireMode::kMidpoint;
  throw ParameterError("unknown fire mode '" + std::string(name) + "'");
}

enum class ConvEngine { kFft, kRecurrence };

inline std::string_view to_string(ConvEngine engine) {
  return engine == ConvEngine::kFft ? "fft" : "recurrence";
}

inline ConvEngine parse_conv_engine(std::string_view name) {
  if (name == "fft") return ConvEngine::kFft;
  if (name == "recurrence") return ConvEngine::kRecurrence;
  throw ParameterError("unknown convolution engine '" + std::string(name) + "'");
}

struct BoundState {
  SpikeTrain upper;  // starts all ones
  SpikeTrain lower;  // starts all zeros
  std::size_t iterations_run = 0;

  static BoundState initial(std::size_t length) {
    return {SpikeTrain(length, true), SpikeTrain(length, false), 0};
  }

  std::size_t size() const noexcept { return upper.size(); }

  bool fuzzy(std::size_t t) const noexcept { return upper[t] != lower[t]; }

  std::vector<bool> fuzzy_mask() const {
    std::vector<bool> mask(size());
    for (std::size_t t = 0; t < size(); ++t) mask[t] = fuzzy(t);
    return mask;
  }

  bool consistent() const noexcept {
    if (upper.size() != lower.size()) return false;
    for (std::size_t t = 0; t < size(); ++t) {
      if (lower[t] && !upper[t]) return false;
    }
    return true;
  }
};

// Fraction of time steps whose spike is already determined by the bounds.
inline double explicit_fraction(const BoundState& bounds) {
  if (bounds.size() == 0) return 0.0;
  std::size_t settled = 0;
  for (std::size_t t = 0; t < bounds.size(); ++t) settled += !bounds.fuzzy(t);
  return static_cast<double>(settled) / static_cast<double>(bounds.size());
}

// Snapshot handed to an observer after every round.
struct IterationView {
  std::size_t channel;
  std::size_t iteration;  // 1-based
  std::span<const double> k;
  std::span<const double> m_upper;  // bound used in this round
  std::span<const double> m_lower;
  const BoundState& bounds;         // bounds after this round
};

using IterationObserver = std::function<void(const IterationView&)>;

struct PmbcOptions {
  std::size_t max_iters = 3;
  FireMode mode = FireMode::kAllZero;
  ConvEngine engine = ConvEngine::kFft;
  std::uint64_t seed = 0;   // MeanRate draws only
  std::size_t threads = 1;  // batch solves; 0 = hardware concurrency
  IterationObserver observer;
};

struct PmbcResult {
  SpikeTrain spikes;
  BoundState bounds;
  double fuzzy_rate = 0.0;               // unresolved fraction before filling
  std::vector<double> explicit_history;  // explicit fraction after each round
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t channel) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (channel + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void check_solver_params(const NeuronParams& params,
                                const PmbcOptions& options) {
  params.validate();
  if (params.reset_mode != ResetMode::kSoft &&
      params.reset_mode != ResetMode::kRefractory)
    throw UnsupportedModeError("PMBC supports soft and refractory reset, got " +
                               std::string(to_string(params.reset_mode)));
  if (options.max_iters == 0)
    throw ParameterError("PMBC needs at least one iteration");
}

// One bound update at step t; returns true when either bound moved. The
// upper bound only drops where the lower bound is still 0 so that
// lower <= upper survives rounding in m.
inline bool tighten_step(double k, double m_up, double m_low, std::uint8_t& up,
                         std::uint8_t& low) noexcept {
  const std::uint8_t new_low = low | (up & static_cast<std::uint8_t>(k > m_up));
  const std::uint8_t new_up =
      up & (new_low | static_cast<std::uint8_t>(!(k < m_low)));
  const bool changed = (new_low != low) || (new_up != up);
  up = new_up;
  low = new_low;
  return changed;
}

}  // namespace detail

// Settles the fuzzy positions of `bounds`; definite positions keep their
// value. m_upper/m_lower are the bounds of the last round (Midpoint only).
inline SpikeTrain resolve_fuzzy(const BoundState& bounds,
                                std::span<const double> k,
                                std::span<const double> m_upper,
                                std::span<const double> m_lower, FireMode mode,
                                std::uint64_t seed = 0) {
  if (!bounds.consistent())
    throw InvariantError("lower spike bound exceeds upper bound");
  const std::size_t length = bounds.size();
  if (mode == FireMode::kMidpoint &&
      (k.size() != length || m_upper.size() != length ||
       m_lower.size() != length))
    throw ShapeError("midpoint resolution needs k and m bounds of length L");

  SpikeTrain out = bounds.lower;
  switch (mode) {
    case FireMode::kAllZero:
      break;
    case FireMode::kAllOne:
      for (std::size_t t = 0; t < length; ++t)
        if (bounds.fuzzy(t)) out.set(t, true);
      break;
    case FireMode::kMeanRate: {
      std::size_t definite = 0;
      std::size_t fired = 0;
      for (std::size_t t = 0; t < length; ++t) {
        if (!bounds.fuzzy(t)) {
          ++definite;
          fired += bounds.lower[t];
        }
      }
      const double p = definite == 0 ? 0.0
                                     : static_cast<double>(fired) /
                                           static_cast<double>(definite);
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution draw(p);
      for (std::size_t t = 0; t < length; ++t)
        if (bounds.fuzzy(t)) out.set(t, draw(rng));
      break;
    }
    case FireMode::kMidpoint:
      for (std::size_t t = 0; t < length; ++t)
        if (bounds.fuzzy(t)) out.set(t, k[t] > 0.5 * (m_upper[t] + m_lower[t]));
      break;
  }
  return out;
}

namespace detail {

// Frequency-domain kernels shared by every channel of one (params, L) pair.
class FftSolverKernels {
 public:
  FftSolverKernels(const NeuronParams& params, std::size_t length)
      : input_(exp_kernel(params.tau, length).taps.view()),
        reset_(params.reset_mode == ResetMode::kRefractory
                   ? SpectralKernel(
                         refractory_kernel(params.tau, params.tau_r, length)
                             .taps.view())
                   : input_) {}

  const SpectralKernel& input() const noexcept { return input_; }
  const SpectralKernel& reset() const noexcept { return reset_; }

 private:
  SpectralKernel input_;
  SpectralKernel reset_;
};

inline PmbcResult solve_fft(const NeuronParams& params,
                            const FftSolverKernels& kernels, const Trace& input,
                            const PmbcOptions& options, std::size_t channel) {
  const std::size_t length = input.size();
  if (kernels.input().length() != length)
    throw ShapeError("input length does not match the solver kernels");

  std::vector<double> k(length);
  kernels.input().apply(input.view(), k);

  PmbcResult result;
  result.bounds = BoundState::initial(length);
  auto& bounds = result.bounds;
  std::vector<double> up_shift(length, 0.0);
  std::vector<double> low_shift(length, 0.0);
  std::vector<double> m_up(length);
  std::vector<double> m_low(length);

  for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
    for (std::size_t t = 1; t < length; ++t) {
      up_shift[t] = bounds.upper[t - 1] ? 1.0 : 0.0;
      low_shift[t] = bounds.lower[t - 1] ? 1.0 : 0.0;
    }
    kernels.reset().apply_pair(up_shift, low_shift, m_up, m_low);
    for (std::size_t t = 0; t < length; ++t) {
      m_up[t] = params.u_th * m_up[t] + params.v_th;
      m_low[t] = params.u_th * m_low[t] + params.v_th;
    }

    bool changed = false;
    auto up = bounds.upper.raw();
    auto low = bounds.lower.raw();
    for (std::size_t t = 0; t < length; ++t)
      changed |= tighten_step(k[t], m_up[t], m_low[t], up[t], low[t]);

    ++bounds.iterations_run;
    const double settled = explicit_fraction(bounds);
    result.explicit_history.push_back(settled);
    if (options.observer)
      options.observer({channel, iter, k, m_up, m_low, bounds});
    if (!changed || settled == 1.0) break;
  }

  result.fuzzy_rate = 1.0 - explicit_fraction(bounds);
  result.spikes = resolve_fuzzy(bounds, k, m_up, m_low, options.mode,
                                mix_seed(options.seed, channel));
  return result;
}

// Recurrence engine.
//
// Round r at step t needs only the bounds of round r - 1 at steps <= t, so
// several rounds can advance together in one sweep over time: at every step
// round 1 settles its bounds, hands them to round 2, and so on. The bounds
// after each round are exactly those of running the rounds one after another;
// the fused sweep only changes the order of evaluation. The reset traces are
// linear recurrences, so the comparison is off every loop-carried chain and
// the lanes (channels) vectorize.
//
// A round that changes nothing is a fixed point: every later round repeats
// it. Running a few extra rounds inside a fused group therefore never alters
// the bounds; the bookkeeping only records where each lane stopped.

inline constexpr std::size_t kMaxFusedRounds = 4;

// Channels per block in batch solves; one AVX-512 register of doubles.
inline constexpr std::size_t kBlockWidth = 8;

struct RecurrenceWorkspace {
  std::vector<double> m_up, m_low, zeros;
  std::vector<std::uint8_t> pad_up, pad_low;

  void prepare(std::size_t length, std::size_t width, bool keep_m) {
    m_up.resize(keep_m ? length * width : 0);
    m_low.resize(keep_m ? length * width : 0);
    zeros.assign(length, 0.0);
    pad_up.assign(length, 1);
    pad_low.assign(length, 0);
  }
};

template <std::size_t Width>
struct RoundTally {
  double changed[kMaxFusedRounds][Width] = {};
  double settled[kMaxFusedRounds][Width] = {};
};

// Width doubles processed as one value; compiles to the widest vector unit
// the target offers.
template <std::size_t Width>
struct LanePack {
  using type [[gnu::vector_size(sizeof(double) * Width)]] = double;
};

// Per-lane views of one channel block.
template <std::size_t Width>
struct BlockLanes {
  const double* input[Width];
  std::uint8_t* upper[Width];  // updated in place
  std::uint8_t* lower[Width];
};

// Runs Rounds fused rounds over one block. Each step reads the bounds left
// by the previous group and overwrites them with the bounds after the last
// round of this group; later steps never look back at them, so the update
// is done in place. m_up/m_low (optional, time-major) receive the bounds of
// the last round.
template <std::size_t Width, std::size_t Rounds, bool Refractory>
void fused_rounds(std::size_t length, const NeuronParams& params,
                  const BlockLanes<Width>& lanes, double* __restrict m_up,
                  double* __restrict m_low, RoundTally<Width>& tally) {
  using Pack = typename LanePack<Width>::type;
  auto splat = [](double v) {
    Pack p;
    for (std::size_t l = 0; l < Width; ++l) p[l] = v;
    return p;
  };
  const Pack tau = splat(params.tau);
  const Pack tau_r = splat(params.pulse_decay());
  const Pack u_th = splat(params.u_th);
  const Pack v_th = splat(params.v_th);
  const Pack one = splat(1.0);
  const Pack zero = splat(0.0);

  Pack k = zero;
  Pack pulse_up[Rounds], pulse_low[Rounds], acc_up[Rounds], acc_low[Rounds];
  Pack changed[Rounds], settled[Rounds];
  for (std::size_t r = 0; r < Rounds; ++r) {
    pulse_up[r] = pulse_low[r] = acc_up[r] = acc_low[r] = zero;
    changed[r] = settled[r] = zero;
  }

  // Lanes are transposed into time-major tiles so the sweep reads whole packs.
  constexpr std::size_t kTile = 64;
  alignas(64) double in_tile[kTile][Width];
  alignas(64) double up_tile[kTile][Width];
  alignas(64) double low_tile[kTile][Width];

  for (std::size_t t0 = 0; t0 < length; t0 += kTile) {
    const std::size_t steps = std::min(kTile, length - t0);
    for (std::size_t l = 0; l < Width; ++l) {
      const double* in = lanes.input[l] + t0;
      const std::uint8_t* up = lanes.upper[l] + t0;
      const std::uint8_t* low = lanes.lower[l] + t0;
      for (std::size_t i = 0; i < steps; ++i) {
        in_tile[i][l] = in[i];
        up_tile[i][l] = up[i];
        low_tile[i][l] = low[i];
      }
    }

    for (std::size_t i = 0; i < steps; ++i) {
      const std::size_t row = (t0 + i) * Width;
      Pack sample, su, sl;
      std::memcpy(&sample, in_tile[i], sizeof sample);
      std::memcpy(&su, up_tile[i], sizeof su);
      std::memcpy(&sl, low_tile[i], sizeof sl);
      k = tau * k + sample;

      for (std::size_t r = 0; r < Rounds; ++r) {
        const Pack mu = u_th * acc_up[r] + v_th;
        const Pack ml = u_th * acc_low[r] + v_th;
        if (Rounds - 1 == r && m_up != nullptr) {
          std::memcpy(m_up + row, &mu, sizeof mu);
          std::memcpy(m_low + row, &ml, sizeof ml);
        }
        const Pack nl = k > mu ? su : sl;
        const Pack nu = k < ml ? nl : su;
        changed[r] += (su - nu) + (nl - sl);
        settled[r] += one - (nu - nl);
        if constexpr (Refractory) {
          pulse_up[r] = tau_r * pulse_up[r] + su;
          pulse_low[r] = tau_r * pulse_low[r] + sl;
          acc_up[r] = tau * acc_up[r] + pulse_up[r];
          acc_low[r] = tau * acc_low[r] + pulse_low[r];
        } else {
          acc_up[r] = tau * acc_up[r] + su;
          acc_low[r] = tau * acc_low[r] + sl;
        }
        su = nu;
        sl = nl;
      }
      std::memcpy(up_tile[i], &su, sizeof su);
      std::memcpy(low_tile[i], &sl, sizeof sl);
    }

    for (std::size_t l = 0; l < Width; ++l) {
      std::uint8_t* up = lanes.upper[l] + t0;
      std::uint8_t* low = lanes.lower[l] + t0;
      for (std::size_t i = 0; i < steps; ++i) {
        up[i] = static_cast<std::uint8_t>(up_tile[i][l]);
        low[i] = static_cast<std::uint8_t>(low_tile[i][l]);
      }
    }
  }
  for (std::size_t r = 0; r < Rounds; ++r) {
    for (std::size_t l = 0; l < Width; ++l) {
      tally.changed[r][l] = changed[r][l];
      tally.settled[r][l] = settled[r][l];
    }
  }
}

template <std::size_t Width, bool Refractory>
void fused_rounds_dispatch(std::size_t rounds, std::size_t length,
                           const NeuronParams& params,
                           const BlockLanes<Width>& lanes,
                           RecurrenceWorkspace& work, bool keep_m,
                           RoundTally<Width>& tally) {
  double* m_up = keep_m ? work.m_up.data() : nullptr;
  double* m_low = keep_m ? work.m_low.data() : nullptr;
  auto run = [&]<std::size_t R>(std::integral_constant<std::size_t, R>) {
    fused_rounds<Width, R, Refractory>(length, params, lanes, m_up, m_low,
                                       tally);
  };
  switch (rounds) {
    case 1: run(std::integral_constant<std::size_t, 1>{}); break;
    case 2: run(std::integral_constant<std::size_t, 2>{}); break;
    case 3: run(std::integral_constant<std::size_t, 3>{}); break;
    default: run(std::integral_constant<std::size_t, kMaxFusedRounds>{}); break;
  }
}

// Solves up to Width channels side by side. Unused lanes see zero input.
template <std::size_t Width>
void solve_recurrence_block(const NeuronParams& params,
                            std::span<const Trace* const> inputs,
                            const PmbcOptions& options,
                            std::size_t first_channel,
                            std::span<PmbcResult> results,
                            RecurrenceWorkspace& work) {
  const std::size_t lanes = inputs.size();
  const std::size_t length = inputs.front()->size();
  const bool keep_m = options.mode == FireMode::kMidpoint ||
                      static_cast<bool>(options.observer);
  // Observers see every round, so rounds are not fused for them.
  const std::size_t group_limit =
      options.observer ? std::size_t{1} : kMaxFusedRounds;
  const bool refractory = params.pulse_decay() != 0.0;

  work.prepare(length, Width, keep_m);
  BlockLanes<Width> view;
  for (std::size_t l = 0; l < Width; ++l) {
    if (l < lanes) {
      results[l].bounds = BoundState::initial(length);
      view.input[l] = inputs[l]->values().data();
      view.upper[l] = results[l].bounds.upper.raw().data();
      view.lower[l] = results[l].bounds.lower.raw().data();
    } else {
      // Padding lanes share one buffer; their values are never read back.
      view.input[l] = work.zeros.data();
      view.upper[l] = work.pad_up.data();
      view.lower[l] = work.pad_low.data();
    }
  }

  std::array<bool, Width> active{};
  for (std::size_t l = 0; l < lanes; ++l) active[l] = true;
  std::vector<std::vector<double>> history(lanes);
  std::vector<std::size_t> rounds_run(lanes, 0);

  auto lane_k = [&](std::size_t l) {
    std::vector<double> k(length);
    double acc = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
      acc = params.tau * acc + view.input[l][t];
      k[t] = acc;
    }
    return k;
  };
  auto lane_m = [&](const std::vector<double>& m, std::size_t l) {
    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t) out[t] = m[t * Width + l];
    return out;
  };

  std::size_t done = 0;
  while (done < options.max_iters) {
    const std::size_t group = std::min(group_limit, options.max_iters - done);
    RoundTally<Width> tally;
    if (refractory)
      fused_rounds_dispatch<Width, true>(group, length, params, view, work,
                                         keep_m, tally);
    else
      fused_rounds_dispatch<Width, false>(group, length, params, view, work,
                                          keep_m, tally);

    bool any_active = false;
    for (std::size_t l = 0; l < lanes; ++l) {
      for (std::size_t r = 0; r < group && active[l]; ++r) {
        ++rounds_run[l];
        const double fraction =
            tally.settled[r][l] / static_cast<double>(length);
        history[l].push_back(fraction);
        if (tally.changed[r][l] == 0.0 || fraction == 1.0) active[l] = false;
      }
      any_active |= active[l];
      if (options.observer) {
        BoundState snapshot = results[l].bounds;
        snapshot.iterations_run = done + group;
        const auto k = lane_k(l);
        const auto mu = lane_m(work.m_up, l);
        const auto ml = lane_m(work.m_low, l);
        options.observer({first_channel + l, done + group, k, mu, ml, snapshot});
      }
    }
    done += group;
    if (!any_active) break;
  }

  for (std::size_t l = 0; l < lanes; ++l) {
    PmbcResult& r = results[l];
    r.bounds.iterations_run = rounds_run[l];
    r.explicit_history = std::move(history[l]);
    r.fuzzy_rate = 1.0 - explicit_fraction(r.bounds);
    if (r.fuzzy_rate == 0.0 || options.mode == FireMode::kAllZero) {
      r.spikes = r.bounds.lower;
      continue;
    }
    std::vector<double> k, mu, ml;
    if (keep_m) {
      k = lane_k(l);
      mu = lane_m(work.m_up, l);
      ml = lane_m(work.m_low, l);
    }
    r.spikes = resolve_fuzzy(r.bounds, k, mu, ml, options.mode,
                             mix_seed(options.seed, first_channel + l));
  }
}

}  // namespace detail

// Resolves one channel. Returned spikes are final: definite positions come
// from the bounds, the rest from options.mode.
inline PmbcResult pmbc_solve(const NeuronParams& params, const Trace& input,
                             const PmbcOptions& options = {}) {
  detail::check_solver_params(params, options);
  require_nonempty_finite(input, "input current");
  if (options.engine == ConvEngine::kFft) {
    const detail::FftSolverKernels kernels(params, input.size());
    return detail::solve_fft(params, kernels, input, options, 0);
  }
  PmbcResult result;
  const Trace* in = &input;
  detail::RecurrenceWorkspace work;
  detail::solve_recurrence_block<1>(params, std::span(&in, 1), options, 0,
                                    std::span(&result, 1), work);
  return result;
}

inline PmbcResult pmbc_solve(const NeuronParams& params, const Trace& input,
                             std::size_t max_iters, FireMode mode) {
  PmbcOptions options;
  options.max_iters = max_iters;
  options.mode = mode;
  return pmbc_solve(params, input, options);
}

// Resolves C independent channels that share params and length. Kernel
// transforms are built once and shared read-only across channels; channels
// (or channel blocks) are distributed over options.threads workers. Results
// do not depend on the thread count.
inline std::vector<PmbcResult> pmbc_solve_batch(const NeuronParams& params,
                                                std::span<const Trace> inputs,
                                                const PmbcOptions& options = {}) {
  detail::check_solver_params(params, options);
  if (inputs.empty()) return {};
  const std::size_t length = inputs.front().size();
  for (const auto& in : inputs) {
    require_nonempty_finite(in, "input current");
    if (in.size() != length)
      throw ShapeError("batched channels must share one length");
  }

  std::vector<PmbcResult> results(inputs.size());
  if (options.engine == ConvEngine::kFft) {
    const detail::FftSolverKernels kernels(params, length);
    parallel_for(inputs.size(), options.threads, [&](std::size_t c) {
      results[c] = detail::solve_fft(params, kernels, inputs[c], options, c);
    });
    return results;
  }

  constexpr std::size_t kWidth = detail::kBlockWidth;
  const std::size_t blocks = (inputs.size() + kWidth - 1) / kWidth;
  std::size_t workers = options.threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : options.threads;
  workers = std::min(workers, blocks);
  parallel_for(workers, workers, [&](std::size_t w) {
    detail::RecurrenceWorkspace work;
    for (std::size_t b = w; b < blocks; b += workers) {
      const std::size_t first = b * kWidth;
      const std::size_t count = std::min(kWidth, inputs.size() - first);
      std::array<const Trace*, kWidth> block{};
      for (std::size_t i = 0; i < count; ++i) block[i] = &inputs[first + i];
      detail::solve_recurrence_block<kWidth>(
          params, std::span<const Trace* const>(block.data(), count), options,
          first, std::span(results).subspan(first, count), work);
    }
  });
  return results;
}

}  // namespace spikessm
