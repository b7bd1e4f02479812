#include "obslab/profiles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace obslab {

double SignalProfile::value(double t) const {
  double s = offset_;
  for (const auto& term : terms_) {
    s += term.amplitude * std::sin(2.0 * std::numbers::pi * term.frequency_hz * t + term.phase_rad);
  }
  return s;
}

double SignalProfile::integral(double t0, double t1) const {
  double s = offset_ * (t1 - t0);
  for (const auto& term : terms_) {
    const double w = 2.0 * std::numbers::pi * term.frequency_hz;
    if (w == 0.0) {
      s += term.amplitude * std::sin(term.phase_rad) * (t1 - t0);
      continue;
    }
    s += term.amplitude / w * (std::cos(w * t0 + term.phase_rad) - std::cos(w * t1 + term.phase_rad));
  }
  return s;
}

double SignalProfile::sup_norm() const {
  double s = std::abs(offset_);
  for (const auto& term : terms_) s += std::abs(term.amplitude);
  return s;
}

SignalProfile SignalProfile::scaled(double factor) const {
  auto terms = terms_;
  for (auto& term : terms) term.amplitude *= factor;
  return SignalProfile(offset_ * factor, std::move(terms));
}

std::string SignalProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << offset_;
  for (const auto& term : terms_) {
    os << " + " << term.amplitude << "*sin(2pi*" << term.frequency_hz << "t+" << term.phase_rad << ")";
  }
  return os.str();
}

}  // namespace obslab
