#pragma once

// Serial reference implementations of the leaky integrate-and-fire variants
// used throughout the library. Everything here is strict time stepping and
// serves as the ground truth for the parallel solver.
//
// Discrete dynamics (t = 1..L, with s_0 = u_0 = R_0 = 0):
//
//   none:        u_t = tau * u_{t-1} + I_t
//   hard:        u_t = tau * w_{t-1} + I_t,   w_t = s_t ? u_r : u_t
//   soft:        u_t = tau * u_{t-1} + I_t - U_th * s_{t-1}
//   refractory:  R_t = tau_r * R_{t-1} + s_{t-1}
//                u_t = tau * u_{t-1} + I_t - U_th * R_t
//
// and s_t = 1 iff u_t - v_th >= 0. The returned membrane trace is u_t, the
// potential that is compared against the threshold.

#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "spikessm/error.hpp"
#include "spikessm/trace.hpp"

namespace spikessm {

enum class ResetMode { kNone, kHard, kSoft, kRefractory };

inline std::string_view to_string(ResetMode mode) {
  switch (mode) {
    case ResetMode::kNone: return "none";
    case ResetMode::kHard: return "hard";
    case ResetMode::kSoft: return "soft";
    case ResetMode::kRefractory: return "refractory";
  }
  return "unknown";
}

inline ResetMode parse_reset_mode(std::string_view name) {
  if (name == "none") return ResetMode::kNone;
  if (name == "hard") return ResetMode::kHard;
  if (name == "soft") return ResetMode::kSoft;
  if (name == "refractory") return ResetMode::kRefractory;
  throw ParameterError("unknown reset mode '" + std::string(name) + "'");
}

struct NeuronParams {
  double tau = 0.5;    // membrane decay, 0 < tau < 1
  double tau_r = 0.0;  // refractory decay, 0 <= tau_r < 1
  double v_th = 1.0;   // firing threshold, > 0
  double u_th = 1.0;   // reset magnitude, >= 0
  ResetMode reset_mode = ResetMode::kSoft;
  double u_r = 0.0;    // hard-reset value

  static NeuronParams soft(double tau, double v_th, double u_th) {
    return {tau, 0.0, v_th, u_th, ResetMode::kSoft, 0.0};
  }
  static NeuronParams refractory(double tau, double tau_r, double v_th,
                                 double u_th) {
    return {tau, tau_r, v_th, u_th, ResetMode::kRefractory, 0.0};
  }
  static NeuronParams no_reset(double tau, double v_th) {
    return {tau, 0.0, v_th, 0.0, ResetMode::kNone, 0.0};
  }
  static NeuronParams hard(double tau, double v_th, double u_r = 0.0) {
    return {tau, 0.0, v_th, 0.0, ResetMode::kHard, u_r};
  }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(tau) || !finite(tau_r) || !finite(v_th) || !finite(u_th) ||
        !finite(u_r))
      throw ParameterError("neuron parameters must be finite");
    if (!(tau > 0.0 && tau < 1.0))
      throw ParameterError("tau must lie in (0, 1), got " + std::to_string(tau));
    if (!(tau_r >= 0.0 && tau_r < 1.0))
      throw ParameterError("tau_r must lie in [0, 1), got " +
                           std::to_string(tau_r));
    if (!(v_th > 0.0))
      throw ParameterError("v_th must be positive, got " + std::to_string(v_th));
    if (!(u_th >= 0.0))
      throw ParameterError("u_th must be non-negative, got " +
                           std::to_string(u_th));
  }

  // Decay of the sliding reset pulse; soft reset is refractory with tau_r = 0.
  double pulse_decay() const noexcept {
    return reset_mode == ResetMode::kRefractory ? tau_r : 0.0;
  }

  friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

struct LifOutput {
  SpikeTrain spikes;
  Trace membrane;
};

inline bool fires(double potential, double v_th) noexcept {
  return potential - v_th >= 0.0;
}

inline LifOutput serial_lif(const NeuronParams& params, const Trace& input) {
  params.validate();
  require_nonempty_finite(input, "input current");

  const std::size_t length = input.size();
  LifOutput out{SpikeTrain(length), Trace(length)};
  const double tau = params.tau;
  const double v_th = params.v_th;

  switch (params.reset_mode) {
    case ResetMode::kNone: {
      double u = 0.0;
      for (std::size_t t = 0; t < length; ++t) {
        u = tau * u + input[t];
        out.membrane[t] = u;
        out.spikes.set(t, fires(u, v_th));
      }
      break;
    }
    case ResetMode::kHard: {
      double w = 0.0;
      for (std::size_t t = 0; t < length; ++t) {
        const double u = tau * w + input[t];
        const bool s = fires(u, v_th);
        out.membrane[t] = u;
        out.spikes.set(t, s);
        w = s ? params.u_r : u;
      }
      break;
    }
    case ResetMode::kSoft:
    case ResetMode::kRefractory: {
      // Soft and refractory share one expression so that tau_r = 0 gives
      // bitwise-identical results to soft reset.
      const double tau_r = params.pulse_decay();
      const double u_th = params.u_th;
      double u = 0.0;
      double pulse = 0.0;
      double prev_spike = 0.0;
      for (std::size_t t = 0; t < length; ++t) {
        pulse = tau_r * pulse + prev_spike;
        u = tau * u + input[t] - u_th * pulse;
        const bool s = fires(u, v_th);
        out.membrane[t] = u;
        out.spikes.set(t, s);
        prev_spike = s ? 1.0 : 0.0;
      }
      break;
    }
  }
  return out;
}

// Split of the membrane potential into an input-only part k and a spike-only
// part m, with u_t = k_t - m_t + v_th.
struct Decomposition {
  Trace k;
  Trace m;
};

inline Decomposition decompose(const NeuronParams& params, const Trace& input,
                               const SpikeTrain& spikes) {
  params.validate();
  if (params.reset_mode != ResetMode::kSoft &&
      params.reset_mode != ResetMode::kRefractory)
    throw UnsupportedModeError(
        "decomposition exists only for soft and refractory reset, got " +
        std::string(to_string(params.reset_mode)));
  require_nonempty_finite(input, "input current");
  if (spikes.size() != input.size())
    throw ShapeError("spike train and input differ in length");

  const std::size_t length = input.size();
  Decomposition out{Trace(length), Trace(length)};
  const double tau = params.tau;
  const double tau_r = params.pulse_decay();

  double k = 0.0;
  double pulse = 0.0;  // sum_{i<t} tau_r^{t-1-i} s_i
  double acc = 0.0;    // sum_{i<t} q_{t-1-i} s_i
  for (std::size_t t = 0; t < length; ++t) {
    k = tau * k + input[t];
    out.k[t] = k;
    out.m[t] = params.u_th * acc + params.v_th;
    pulse = tau_r * pulse + (spikes[t] ? 1.0 : 0.0);
    acc = tau * acc + pulse;
  }
  return out;
}

// Piecewise quadratic surrogate of the Heaviside step.
inline double surrogate(double x, double alpha = 1.0) {
  if (!std::isfinite(x)) throw DomainError("surrogate argument is not finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("surrogate alpha must be positive");
  const double edge = 1.0 / alpha;
  if (x < -edge) return 0.0;
  if (x > edge) return 1.0;
  return -0.5 * alpha * alpha * std::abs(x) * x + alpha * x + 0.5;
}

inline double surrogate_grad(double x, double alpha = 1.0) {
  if (!std::isfinite(x)) throw DomainError("surrogate argument is not finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("surrogate alpha must be positive");
  if (std::abs(x) > 1.0 / alpha) return 0.0;
  return -alpha * alpha * std::abs(x) + alpha;
}

}  // namespace spikessm
