#pragma once

// Fixed-step histories realizing the transport semantics U(x,t) = C X(t+x-D):
// a delayed value is a lookup into the past, and the distributed delay
// integral is a weighted sum over the stored window.

#include "obslab/se2.hpp"
#include "obslab/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace obslab {

/// How the transition matrix inside the distributed delay integral and the
/// injection gain is anchored in time.
///   literal: Phi(t-theta, 0) from int_0^{t-theta} w  (absolute time origin),
///            injection Phi(D, 0) from int_0^D w.
///   sliding: Phi from int_theta^t w, injection from int_{t-D}^t w.
enum class PhiWindow { literal, sliding };

std::string_view to_string(PhiWindow w);
PhiWindow parse_phi_window(std::string_view s);

/// Ring buffer of vectors sampled every dt. Entries are timestamped
/// implicitly as t0 + k dt; queries between samples interpolate linearly and
/// queries before t0 return the prefill value when one is configured.
class DelayLine {
 public:
  /// Keeps ceil(span/dt) + 1 samples.
  DelayLine(double dt, double span, std::optional<VecX> prefill = std::nullopt);

  /// Appends a sample. The first push fixes t0; later pushes must land on
  /// the previous timestamp + dt (within 1e-9 relative). The oldest sample is
  /// evicted once capacity is reached.
  void push(double t, const VecX& value);

  /// Value at time t. Throws for t past the newest sample, for t in an
  /// evicted region, and for t < t0 without a prefill.
  VecX query(double t) const;

  /// Sample `steps_ago` steps before the newest. Indices reaching before t0
  /// yield the prefill.
  const VecX& back(std::size_t steps_ago) const;

  bool empty() const { return count_ == 0; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buffer_.size(); }
  double dt() const { return dt_; }
  double newest_time() const;
  double oldest_time() const;
  const std::optional<VecX>& prefill() const { return prefill_; }

 private:
  double time_of(long index) const { return t0_ + static_cast<double>(index) * dt_; }
  const VecX& at_index(long index) const;

  double dt_;
  std::optional<VecX> prefill_;
  std::vector<VecX> buffer_;
  std::size_t head_ = 0;   // slot of the next push
  std::size_t size_ = 0;   // retained samples
  long count_ = 0;         // total pushes
  double t0_ = 0.0;
};

/// Running integral Omega(t) = int_0^t w, accumulated by the trapezoid rule
/// at the simulation step. Retains the recent window for sliding kernels and
/// freezes the first D seconds for literal kernels.
class OmegaIntegralHistory {
 public:
  OmegaIntegralHistory(double dt, double delay);

  /// Advances the accumulated integral with one trapezoid step and records
  /// Omega at t (the first call records Omega(t0) = 0 and ignores `omega_prev`).
  void advance(double t, double omega_prev, double omega_now);
  /// Records an externally computed Omega(t).
  void record(double t, double omega_integral);

  double current() const { return current_; }
  double current_time() const { return time_; }
  /// Omega(k dt) for 0 <= k <= D/dt, holding the last known value past the
  /// recorded prefix.
  double early(std::size_t k) const;
  /// Omega at `steps_ago` samples before the newest (0 before t0).
  double recent(std::size_t steps_ago) const;
  std::size_t steps_per_delay() const { return steps_; }

  /// Replaces the literal table with a precomputed Omega(k dt), k = 0..D/dt.
  /// The literal kernel over [0, D] is anticipative for t < D; priming it from
  /// the known angular-rate record keeps every realization consistent.
  void prime_early(std::vector<double> table);
  bool primed() const { return primed_; }

  /// Cached block Phi(k dt, 0) = rot(-Omega(k dt)) of the literal kernel.
  const Mat2& early_kernel(std::size_t k) const;
  /// Cached rot(+Omega) at `steps_ago` samples before the newest; the sliding
  /// kernel factors as rot(-Omega(t)) rot(+Omega(theta)).
  const Mat2& recent_rotation(std::size_t steps_ago) const;

  /// Transition used for the injection gain at the current time.
  TransitionMatrix injection_transition(PhiWindow window) const;

 private:
  struct Sample {
    double omega_integral;
    Mat2 rotation;  // rot(+omega_integral)
  };

  void push_sample(double omega_integral);

  double dt_;
  std::size_t steps_;
  std::vector<double> early_;
  std::vector<Mat2> early_kernel_;
  std::size_t early_known_ = 0;
  bool primed_ = false;
  std::vector<Sample> ring_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  long count_ = 0;
  double current_ = 0.0;
  double time_ = 0.0;
};

/// Steps per delay, requiring D to be an integer multiple of dt (1e-6 relative).
std::size_t delay_steps(double delay, double dt);

/// Trapezoidal quadrature of int_{t-D}^t Phi(t, theta) f(theta) dtheta over the
/// stored samples, where Phi follows `window`. `f_line` holds f up to t - dt
/// (explicit scheme: the theta = t endpoint reuses the newest sample) or up
/// to t. `omega` must be current at t.
Vec6 convolve_history(const DelayLine& f_line, const OmegaIntegralHistory& omega, double t,
                      double delay, PhiWindow window);

}  // namespace obslab
