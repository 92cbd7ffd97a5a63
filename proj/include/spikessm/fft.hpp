#pragma once

// Frequency-domain causal convolution on top of FFTW. A SpectralKernel holds
// the transform of one kernel at a fixed padded size, so it can be shared
// read-only by many signals and threads.

#include <fftw3.h>

#include <bit>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "spikessm/error.hpp"
#include "spikessm/trace.hpp"

namespace spikessm {

namespace detail {

// FFTW's planner is not thread-safe; executing a finished plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// In-place complex transforms of one power-of-two size.
class FftPlan {
 public:
  using Complex = std::complex<double>;

  explicit FftPlan(std::size_t size) : size_(size) {
    if (size == 0 || !std::has_single_bit(size))
      throw ParameterError("FFT size must be a power of two");
    const int n = static_cast<int>(size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_complex* scratch = fftw_alloc_complex(size);
    forward_ = fftw_plan_dft_1d(n, scratch, scratch, FFTW_FORWARD, flags);
    inverse_ = fftw_plan_dft_1d(n, scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (!forward_ || !inverse_) {
      release();
      throw Error("FFTW could not plan a transform of size " + std::to_string(size));
    }
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    release();
  }

  std::size_t size() const noexcept { return size_; }

  void forward(std::span<Complex> data) const { execute(forward_, data); }

  // Unnormalized inverse; callers divide by size().
  void inverse(std::span<Complex> data) const { execute(inverse_, data); }

 private:
  void execute(fftw_plan plan, std::span<Complex> data) const {
    if (data.size() != size_) throw ShapeError("FFT buffer has wrong size");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  void release() noexcept {
    if (forward_) fftw_destroy_plan(forward_);
    if (inverse_) fftw_destroy_plan(inverse_);
    forward_ = inverse_ = nullptr;
  }

  std::size_t size_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

// Smallest power of two that holds a linear convolution of two length-L
// sequences without circular wrap-around.
inline std::size_t linear_conv_size(std::size_t length) {
  return std::bit_ceil(2 * length - 1);
}

class SpectralKernel {
 public:
  using Complex = FftPlan::Complex;

  explicit SpectralKernel(std::span<const double> taps)
      : length_(taps.size()),
        plan_(std::make_shared<const FftPlan>(linear_conv_size(taps.size()))),
        spectrum_(plan_->size()) {
    if (taps.empty()) throw DomainError("kernel is empty");
    for (std::size_t i = 0; i < length_; ++i) spectrum_[i] = taps[i];
    plan_->forward(spectrum_);
    const double scale = 1.0 / static_cast<double>(plan_->size());
    for (auto& c : spectrum_) c *= scale;
  }

  std::size_t length() const noexcept { return length_; }

  // out[t] = sum_{j<=t} kernel[j] * signal[t-j] for t < L.
  void apply(std::span<const double> signal, std::span<double> out) const {
    check(signal, out);
    std::vector<Complex> buf(plan_->size());
    for (std::size_t i = 0; i < length_; ++i) buf[i] = signal[i];
    multiply(buf);
    for (std::size_t i = 0; i < length_; ++i) out[i] = buf[i].real();
  }

  // Two real signals through one complex transform: the kernel is real, so
  // conv(x + iy) = conv(x) + i conv(y).
  void apply_pair(std::span<const double> x, std::span<const double> y,
                  std::span<double> out_x, std::span<double> out_y) const {
    check(x, out_x);
    check(y, out_y);
    std::vector<Complex> buf(plan_->size());
    for (std::size_t i = 0; i < length_; ++i) buf[i] = Complex(x[i], y[i]);
    multiply(buf);
    for (std::size_t i = 0; i < length_; ++i) {
      out_x[i] = buf[i].real();
      out_y[i] = buf[i].imag();
    }
  }

  Trace apply(const Trace& signal) const {
    Trace out(signal.size());
    apply(signal.view(), out.view());
    return out;
  }

 private:
  void check(std::span<const double> in, std::span<double> out) const {
    if (in.size() != length_ || out.size() != length_)
      throw ShapeError("signal length " + std::to_string(in.size()) +
                       " does not match kernel length " +
                       std::to_string(length_));
  }

  void multiply(std::vector<Complex>& buf) const {
    plan_->forward(buf);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= spectrum_[i];
    plan_->inverse(buf);
  }

  std::size_t length_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<Complex> spectrum_;
};

}  // namespace spikessm
