#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <utility>
#include <vector>

#include "spikessm/error.hpp"

namespace spikessm::harness {

struct TimingStats {
  double median = 0.0;  // seconds
  double min = 0.0;
  double max = 0.0;
  std::vector<double> samples;
};

inline TimingStats summarize(std::vector<double> samples) {
  if (samples.empty()) throw ParameterError("no timing samples");
  TimingStats stats;
  stats.samples = samples;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  stats.median = n % 2 ? samples[n / 2]
                       : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  stats.min = samples.front();
  stats.max = samples.back();
  return stats;
}

// Wall-clock seconds of one call on the monotonic clock.
template <typename Fn>
double time_once(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Median of `repeats` calls after `warmup` discarded calls.
template <typename Fn>
TimingStats time_median(Fn&& fn, std::size_t repeats, std::size_t warmup) {
  if (repeats == 0) throw ParameterError("repeats must be at least 1");
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(repeats);
  for (std::size_t i = 0; i < repeats; ++i) samples.push_back(time_once(fn));
  return summarize(std::move(samples));
}

// Times two workloads in alternation so slow drift of the host (frequency
// scaling, background load) hits both equally.
template <typename A, typename B>
std::pair<TimingStats, TimingStats> time_paired(A&& a, B&& b,
                                                std::size_t repeats,
                                                std::size_t warmup) {
  if (repeats == 0) throw ParameterError("repeats must be at least 1");
  for (std::size_t i = 0; i < warmup; ++i) {
    a();
    b();
  }
  std::vector<double> sa, sb;
  for (std::size_t i = 0; i < repeats; ++i) {
    sa.push_back(time_once(a));
    sb.push_back(time_once(b));
  }
  return {summarize(std::move(sa)), summarize(std::move(sb))};
}

}  // namespace spikessm::harness
