#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikessm/error.hpp"

namespace spikessm {

// Real-valued sequence of length L. Storage index 0 holds time step t = 1.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::size_t length, double fill = 0.0) : values_(length, fill) {}
  explicit Trace(std::vector<double> values) : values_(std::move(values)) {}
  Trace(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }

  std::span<const double> view() const noexcept { return values_; }
  std::span<double> view() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<double> values_;
};

// Binary sequence of length L; each element is exactly 0 or 1.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  explicit SpikeTrain(std::size_t length, bool fill = false)
      : spikes_(length, fill ? 1 : 0) {}
  SpikeTrain(std::initializer_list<int> spikes) {
    spikes_.reserve(spikes.size());
    for (int s : spikes) {
      if (s != 0 && s != 1) throw DomainError("spike values must be 0 or 1");
      spikes_.push_back(static_cast<std::uint8_t>(s));
    }
  }

  std::size_t size() const noexcept { return spikes_.size(); }
  bool empty() const noexcept { return spikes_.empty(); }

  bool operator[](std::size_t i) const noexcept { return spikes_[i] != 0; }
  void set(std::size_t i, bool value) noexcept { spikes_[i] = value ? 1 : 0; }

  std::size_t count() const noexcept {
    return std::accumulate(spikes_.begin(), spikes_.end(), std::size_t{0});
  }

  // Mean of the spike train; 0 for an empty train.
  double rate() const noexcept {
    return spikes_.empty() ? 0.0
                           : static_cast<double>(count()) /
                                 static_cast<double>(spikes_.size());
  }

  std::span<const std::uint8_t> view() const noexcept { return spikes_; }
  std::span<std::uint8_t> raw() noexcept { return spikes_; }

  std::string to_string() const {
    std::string out;
    out.reserve(spikes_.size());
    for (auto s : spikes_) out.push_back(s ? '1' : '0');
    return out;
  }

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  std::vector<std::uint8_t> spikes_;
};

inline void require_nonempty_finite(const Trace& trace, const char* what) {
  if (trace.empty()) throw DomainError(std::string(what) + " is empty");
  if (!trace.all_finite())
    throw DomainError(std::string(what) + " contains non-finite values");
}

}  // namespace spikessm
