#pragma once

// Causal convolution kernels: the exponential membrane kernel p, the
// refractory kernel q, and the zero-order-hold kernel of a diagonal SSM.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "spikessm/error.hpp"
#include "spikessm/fft.hpp"
#include "spikessm/trace.hpp"

namespace spikessm {

// Kernel taps; taps[0] multiplies the current sample.
struct Kernel {
  Trace taps;

  std::size_t size() const noexcept { return taps.size(); }
  double operator[](std::size_t i) const noexcept { return taps[i]; }
};

namespace detail {

inline void check_length(std::size_t length) {
  if (length == 0) throw DomainError("kernel length must be at least 1");
}

inline void check_decay(double tau) {
  if (!std::isfinite(tau) || !(tau > 0.0 && tau < 1.0))
    throw ParameterError("tau must lie in (0, 1)");
}

inline void check_refractory_decay(double tau_r) {
  if (!std::isfinite(tau_r) || !(tau_r >= 0.0 && tau_r < 1.0))
    throw ParameterError("tau_r must lie in [0, 1)");
}

}  // namespace detail

// p = (tau^0, tau^1, ..., tau^{L-1}).
inline Kernel exp_kernel(double tau, std::size_t length) {
  detail::check_decay(tau);
  detail::check_length(length);
  Kernel k{Trace(length)};
  double v = 1.0;
  for (std::size_t i = 0; i < length; ++i) {
    k.taps[i] = v;
    v *= tau;
  }
  return k;
}

// q_t = sum_{j=0..t} tau^j tau_r^{t-j}, the convolution of the membrane and
// pulse kernels.
inline Kernel refractory_kernel(double tau, double tau_r, std::size_t length) {
  detail::check_decay(tau);
  detail::check_refractory_decay(tau_r);
  detail::check_length(length);
  if (tau_r == 0.0) return exp_kernel(tau, length);

  Kernel k{Trace(length)};
  if (tau == tau_r) {
    double power = 1.0;
    for (std::size_t t = 0; t < length; ++t) {
      k.taps[t] = static_cast<double>(t + 1) * power;
      power *= tau;
    }
    return k;
  }
  // (tau_r^{t+1} - tau^{t+1}) / (tau_r - tau)
  const double inv_gap = 1.0 / (tau_r - tau);
  double pr = tau_r;
  double pt = tau;
  for (std::size_t t = 0; t < length; ++t) {
    k.taps[t] = (pr - pt) * inv_gap;
    pr *= tau_r;
    pt *= tau;
  }
  return k;
}

// Linear causal convolution truncated to L, evaluated in the frequency
// domain with zero padding to the next power of two >= 2L - 1.
inline Trace causal_conv(const Trace& signal, const Kernel& kernel) {
  if (signal.size() != kernel.size())
    throw ShapeError("signal length " + std::to_string(signal.size()) +
                     " differs from kernel length " +
                     std::to_string(kernel.size()));
  if (signal.empty()) throw DomainError("signal is empty");
  return SpectralKernel(kernel.taps.view()).apply(signal);
}

// (x_1, ..., x_L) -> (0, x_1, ..., x_{L-1}).
inline Trace shift_one(const Trace& signal) {
  Trace out(signal.size());
  for (std::size_t t = 1; t < signal.size(); ++t) out[t] = signal[t - 1];
  return out;
}

// Diagonal continuous-time SSM x' = Ax + Bu, y = Re(Cx) with sample time
// delta.
struct SsmLayerParams {
  using Complex = std::complex<double>;

  std::vector<Complex> a;
  std::vector<Complex> b;
  std::vector<Complex> c;
  double delta = 0.01;

  std::size_t state_size() const noexcept { return a.size(); }

  // S4D-Lin: a_n = -1/2 + i*pi*n, b_n = 1, c_n = 1.
  static SsmLayerParams s4d_lin(std::size_t state_size, double delta) {
    SsmLayerParams p;
    p.delta = delta;
    for (std::size_t n = 0; n < state_size; ++n) {
      p.a.emplace_back(-0.5, std::numbers::pi * static_cast<double>(n));
      p.b.emplace_back(1.0, 0.0);
      p.c.emplace_back(1.0, 0.0);
    }
    return p;
  }

  void validate() const {
    if (a.empty()) throw ParameterError("SSM state size must be at least 1");
    if (b.size() != a.size() || c.size() != a.size())
      throw ShapeError("SSM a, b, c must have equal length");
    if (!std::isfinite(delta) || !(delta > 0.0))
      throw ParameterError("SSM delta must be positive");
    for (const auto& v : a) {
      if (v == Complex(0.0, 0.0))
        throw SingularDiscretizationError(
            "zero-order hold requires nonzero diagonal entries");
      if (!(v.real() < 0.0))
        throw ParameterError("SSM diagonal must have negative real part");
    }
  }
};

// Zero-order-hold discretization of one diagonal mode.
struct DiscreteMode {
  std::complex<double> a_bar;
  std::complex<double> b_bar;
};

inline DiscreteMode discretize(const SsmLayerParams& p, std::size_t n) {
  const auto a_bar = std::exp(p.delta * p.a[n]);
  return {a_bar, (a_bar - 1.0) * p.b[n] / p.a[n]};
}

// taps[j] = Re(sum_n c_n a_bar_n^j b_bar_n).
inline Kernel ssm_kernel(const SsmLayerParams& params, std::size_t length) {
  params.validate();
  detail::check_length(length);
  Kernel k{Trace(length)};
  for (std::size_t n = 0; n < params.state_size(); ++n) {
    const auto mode = discretize(params, n);
    std::complex<double> term = params.c[n] * mode.b_bar;
    for (std::size_t j = 0; j < length; ++j) {
      k.taps[j] += term.real();
      term *= mode.a_bar;
    }
  }
  return k;
}

}  // namespace spikessm
