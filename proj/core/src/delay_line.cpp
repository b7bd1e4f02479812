#include "obslab/delay_line.hpp"

#include <cmath>
#include <string>

namespace obslab {

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

Mat2 rotation_block(double angle) { return Rotation2::from_angle(angle).matrix(); }

}  // namespace

std::string_view to_string(PhiWindow w) { return w == PhiWindow::literal ? "literal" : "sliding"; }

PhiWindow parse_phi_window(std::string_view s) {
  if (s == "literal") return PhiWindow::literal;
  if (s == "sliding") return PhiWindow::sliding;
  throw Error("phi_window must be 'literal' or 'sliding', got '" + std::string(s) + "'");
}

std::size_t delay_steps(double delay, double dt) {
  if (!(dt > 0.0)) throw Error("dt must be positive");
  if (delay < 0.0) throw Error("delay must be non-negative");
  const double ratio = delay / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio)) {
    throw Error("delay must be an integer multiple of dt");
  }
  return static_cast<std::size_t>(rounded);
}

// ---------------------------------------------------------------------------

DelayLine::DelayLine(double dt, double span, std::optional<VecX> prefill)
    : dt_(dt), prefill_(std::move(prefill)) {
  if (!(dt > 0.0)) throw Error("DelayLine: dt must be positive");
  if (span < 0.0) throw Error("DelayLine: span must be non-negative");
  const auto cap = static_cast<std::size_t>(std::ceil(span / dt - 1e-9)) + 1;
  buffer_.resize(std::max<std::size_t>(cap, 2));
}

void DelayLine::push(double t, const VecX& value) {
  if (count_ == 0) {
    t0_ = t;
  } else if (!same_time(t, time_of(count_))) {
    throw Error("DelayLine: out-of-order push at t=" + std::to_string(t) +
                " (expected " + std::to_string(time_of(count_)) + ")");
  }
  buffer_[head_] = value;
  head_ = (head_ + 1) % buffer_.size();
  size_ = std::min(size_ + 1, buffer_.size());
  ++count_;
}

double DelayLine::newest_time() const {
  if (count_ == 0) throw Error("DelayLine is empty");
  return time_of(count_ - 1);
}

double DelayLine::oldest_time() const {
  if (count_ == 0) throw Error("DelayLine is empty");
  return time_of(count_ - static_cast<long>(size_));
}

const VecX& DelayLine::at_index(long index) const {
  if (index < 0) {
    if (!prefill_) throw Error("DelayLine: query before the first sample and no prefill");
    return *prefill_;
  }
  if (index >= count_) throw Error("DelayLine: query beyond the newest sample");
  if (index < count_ - static_cast<long>(size_)) throw Error("DelayLine: insufficient history (evicted)");
  const long from_newest = count_ - 1 - index;
  const auto n = static_cast<long>(buffer_.size());
  const long slot = ((static_cast<long>(head_) - 1 - from_newest) % n + n) % n;
  return buffer_[static_cast<std::size_t>(slot)];
}

const VecX& DelayLine::back(std::size_t steps_ago) const {
  if (count_ == 0) {
    if (!prefill_) throw Error("DelayLine is empty");
    return *prefill_;
  }
  return at_index(count_ - 1 - static_cast<long>(steps_ago));
}

VecX DelayLine::query(double t) const {
  if (count_ == 0) {
    if (prefill_) return *prefill_;
    throw Error("DelayLine is empty");
  }
  const double newest = newest_time();
  if (t > newest && !same_time(t, newest)) throw Error("DelayLine: query beyond the newest sample");
  const double pos = (t - t0_) / dt_;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, std::abs(pos))) {
    return at_index(static_cast<long>(nearest));
  }
  if (t < t0_) {
    if (!prefill_) throw Error("DelayLine: query before the first sample and no prefill");
    return *prefill_;
  }
  const auto lo = static_cast<long>(std::floor(pos));
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * at_index(lo) + w * at_index(lo + 1);
}

// ---------------------------------------------------------------------------

OmegaIntegralHistory::OmegaIntegralHistory(double dt, double delay)
    : dt_(dt), steps_(delay_steps(delay, dt)) {
  early_.assign(steps_ + 1, 0.0);
  early_kernel_.assign(steps_ + 1, Mat2::Identity());
  ring_.assign(steps_ + 2, Sample{0.0, Mat2::Identity()});
}

void OmegaIntegralHistory::prime_early(std::vector<double> table) {
  if (table.size() != steps_ + 1) throw Error("literal Omega table must have D/dt + 1 entries");
  early_ = std::move(table);
  for (std::size_t k = 0; k <= steps_; ++k) early_kernel_[k] = rotation_block(-early_[k]);
  early_known_ = steps_ + 1;
  primed_ = true;
}

void OmegaIntegralHistory::push_sample(double omega_integral) {
  const Mat2 rot = rotation_block(omega_integral);
  ring_[head_] = {omega_integral, rot};
  head_ = (head_ + 1) % ring_.size();
  size_ = std::min(size_ + 1, ring_.size());
  if (!primed_ && static_cast<std::size_t>(count_) <= steps_) {
    early_[static_cast<std::size_t>(count_)] = omega_integral;
    early_kernel_[static_cast<std::size_t>(count_)] = rot.transpose();
    early_known_ = static_cast<std::size_t>(count_) + 1;
  }
  ++count_;
}

void OmegaIntegralHistory::advance(double t, double omega_prev, double omega_now) {
  if (count_ == 0) {
    record(t, 0.0);
    return;
  }
  record(t, current_ + 0.5 * dt_ * (omega_prev + omega_now));
}

void OmegaIntegralHistory::record(double t, double omega_integral) {
  if (count_ > 0 && !same_time(t, time_ + dt_)) throw Error("OmegaIntegralHistory: out-of-order sample");
  current_ = omega_integral;
  time_ = t;
  push_sample(omega_integral);
}

double OmegaIntegralHistory::early(std::size_t k) const {
  if (k > steps_) throw Error("literal Omega table index beyond D/dt");
  if (early_known_ == 0) return 0.0;
  return early_[std::min(k, early_known_ - 1)];
}

const Mat2& OmegaIntegralHistory::early_kernel(std::size_t k) const {
  if (k > steps_) throw Error("literal kernel index beyond D/dt");
  if (early_known_ == 0) return early_kernel_[0];
  return early_kernel_[std::min(k, early_known_ - 1)];
}

double OmegaIntegralHistory::recent(std::size_t steps_ago) const {
  const long index = count_ - 1 - static_cast<long>(steps_ago);
  if (index < 0) return 0.0;
  if (steps_ago >= size_) throw Error("OmegaIntegralHistory: insufficient history");
  const auto n = ring_.size();
  return ring_[(head_ + n - 1 - steps_ago) % n].omega_integral;
}

const Mat2& OmegaIntegralHistory::recent_rotation(std::size_t steps_ago) const {
  static const Mat2 kIdentity = Mat2::Identity();
  const long index = count_ - 1 - static_cast<long>(steps_ago);
  if (index < 0) return kIdentity;
  if (steps_ago >= size_) throw Error("OmegaIntegralHistory: insufficient history");
  const auto n = ring_.size();
  return ring_[(head_ + n - 1 - steps_ago) % n].rotation;
}

TransitionMatrix OmegaIntegralHistory::injection_transition(PhiWindow window) const {
  if (window == PhiWindow::literal) return transition(early(steps_));
  return transition(recent(0) - recent(steps_));
}

// ---------------------------------------------------------------------------

Vec6 convolve_history(const DelayLine& f_line, const OmegaIntegralHistory& omega, double t,
                      double delay, PhiWindow window) {
  const std::size_t m = delay_steps(delay, f_line.dt());
  Vec6 acc = Vec6::Zero();
  if (m == 0) return acc;
  if (m > omega.steps_per_delay()) throw Error("convolve_history: Omega history shorter than the delay");
  if (!same_time(omega.current_time(), t)) throw Error("convolve_history: Omega history not current");

  if (f_line.empty() && !f_line.prefill()) throw Error("convolve_history: insufficient history span");
  const double lag = f_line.empty() ? 1.0 : (t - f_line.newest_time()) / f_line.dt();
  std::size_t offset = 0;
  if (std::abs(lag - 1.0) < 1e-6) {
    offset = 1;
  } else if (std::abs(lag) >= 1e-6) {
    throw Error("convolve_history: f history must end at t or t - dt");
  }
  if (!f_line.empty() && f_line.size() + offset < m + 1 && f_line.oldest_time() > t - delay + 0.5 * f_line.dt() &&
      !f_line.prefill()) {
    throw Error("convolve_history: insufficient history span");
  }

  const double dt = f_line.dt();
  for (std::size_t k = 0; k <= m; ++k) {
    const VecX& f = (k < offset) ? f_line.back(0) : f_line.back(k - offset);
    const Mat2& r = window == PhiWindow::literal ? omega.early_kernel(k) : omega.recent_rotation(k);
    const double w = (k == 0 || k == m) ? 0.5 * dt : dt;
    for (int b = 0; b < 3; ++b) acc.segment<2>(2 * b) += w * (r * f.segment<2>(2 * b));
  }
  if (window == PhiWindow::sliding) {
    const Mat2 now = omega.recent_rotation(0).transpose();
    for (int b = 0; b < 3; ++b) acc.segment<2>(2 * b) = now * acc.segment<2>(2 * b);
  }
  return acc;
}

}  // namespace obslab
