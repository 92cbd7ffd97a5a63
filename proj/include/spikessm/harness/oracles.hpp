#pragma once

// Brute-force references used by the verification suites. They share no
// code with the fast paths they check: convolutions are direct sums, the SSM
// runs as a state recurrence, and kernels come from their defining sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "spikessm/kernels.hpp"
#include "spikessm/neuron.hpp"
#include "spikessm/trace.hpp"

namespace spikessm::harness {

// out[t] = sum_{j<=t} kernel[j] * signal[t-j], O(L^2).
inline Trace direct_conv(const Trace& signal, const Trace& kernel) {
  Trace out(signal.size());
  for (std::size_t t = 0; t < signal.size(); ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= t; ++j) acc += kernel[j] * signal[t - j];
    out[t] = acc;
  }
  return out;
}

// h_t = a_bar h_{t-1} + b_bar x_t, y_t = Re(sum_n c_n h_t), h_0 = 0.
inline Trace ssm_recurrence(const SsmLayerParams& params, const Trace& input) {
  std::vector<std::complex<double>> h(params.state_size());
  std::vector<std::complex<double>> a_bar(params.state_size());
  std::vector<std::complex<double>> b_bar(params.state_size());
  for (std::size_t n = 0; n < params.state_size(); ++n) {
    a_bar[n] = std::exp(params.delta * params.a[n]);
    b_bar[n] = (a_bar[n] - 1.0) / params.a[n] * params.b[n];
  }
  Trace y(input.size());
  for (std::size_t t = 0; t < input.size(); ++t) {
    std::complex<double> out = 0.0;
    for (std::size_t n = 0; n < params.state_size(); ++n) {
      h[n] = a_bar[n] * h[n] + b_bar[n] * input[t];
      out += params.c[n] * h[n];
    }
    y[t] = out.real();
  }
  return y;
}

// q_t = sum_{j=0..t} tau^j tau_r^{t-j}, evaluated term by term.
inline Trace refractory_kernel_sum(double tau, double tau_r, std::size_t length) {
  Trace q(length);
  for (std::size_t t = 0; t < length; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= t; ++j)
      acc += std::pow(tau, static_cast<double>(j)) *
             std::pow(tau_r, static_cast<double>(t - j));
    q[t] = acc;
  }
  return q;
}

// k_t = sum_{i<=t} tau^{t-i} I_i and m_t = U_th sum_{i<t} q_{t-1-i} s_i + v_th
// as explicit double sums.
inline Decomposition decompose_sum(const NeuronParams& params, const Trace& input,
                                   const SpikeTrain& spikes) {
  const std::size_t length = input.size();
  const double tau_r =
      params.reset_mode == ResetMode::kRefractory ? params.tau_r : 0.0;
  const Trace q = refractory_kernel_sum(params.tau, tau_r, length);
  Decomposition d{Trace(length), Trace(length)};
  for (std::size_t t = 0; t < length; ++t) {
    double k = 0.0;
    for (std::size_t i = 0; i <= t; ++i)
      k += std::pow(params.tau, static_cast<double>(t - i)) * input[i];
    double m = 0.0;
    for (std::size_t i = 0; i < t; ++i)
      if (spikes[i]) m += q[t - 1 - i];
    d.k[t] = k;
    d.m[t] = params.u_th * m + params.v_th;
  }
  return d;
}

inline double max_abs_diff(const Trace& a, const Trace& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs(const Trace& a) {
  double worst = 0.0;
  for (double v : a) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace spikessm::harness
