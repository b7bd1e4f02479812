#pragma once

#include "obslab/types.hpp"

#include <string>
#include <vector>

namespace obslab {

/// One term a * sin(2*pi*f*t + phase).
struct SineTerm {
  double amplitude = 0.0;
  double frequency_hz = 0.0;
  double phase_rad = 0.0;
};

/// Scalar signal offset + sum of sines. Closed under integration, so the
/// exact integral is available to tests and to the transport co-simulation.
class SignalProfile {
 public:
  SignalProfile() = default;
  explicit SignalProfile(double offset, std::vector<SineTerm> terms = {})
      : offset_(offset), terms_(std::move(terms)) {}

  static SignalProfile constant(double value) { return SignalProfile(value); }
  static SignalProfile sine(double amplitude, double frequency_hz, double phase_rad = 0.0) {
    return SignalProfile(0.0, {{amplitude, frequency_hz, phase_rad}});
  }

  double value(double t) const;
  /// Exact integral over [t0, t1].
  double integral(double t0, double t1) const;
  /// Upper bound on |value(t)|.
  double sup_norm() const;

  SignalProfile scaled(double factor) const;

  double offset() const { return offset_; }
  const std::vector<SineTerm>& terms() const { return terms_; }

  /// Human-readable form, e.g. "2*sin(2pi*0.02t+0)".
  std::string describe() const;

 private:
  double offset_ = 0.0;
  std::vector<SineTerm> terms_;
};

}  // namespace obslab
