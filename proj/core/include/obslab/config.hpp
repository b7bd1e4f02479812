#pragma once

// Scenario files: one "key = value" per line, '#' starts a comment, blank
// lines ignored. The first key must be `schema`. Unknown or repeated keys are
// errors. Physical quantities carry their unit in the key name.
//
// Profiles are ';'-separated terms, each either "const <c>" or
// "sine <amplitude> <frequency_hz> [phase_rad]":
//   omega_rad_s = sine 2 0.02
//   vx_m_s      = const 1

#include "obslab/margins.hpp"
#include "obslab/sim.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace obslab {

inline constexpr std::string_view kConfigSchema = "obslab-scenario/1";

class ConfigError : public Error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct MarginSettings {
  std::optional<double> kappa1;        // nullopt: pick automatically
  std::optional<double> t_window;      // nullopt: excitation grid search
  double horizon = 100.0;              // s, for gamma and beta2
  UpperBoundRule rule = UpperBoundRule::max;
};

struct ScenarioConfig {
  Scenario scenario;
  MarginSettings margin;
};

SignalProfile parse_profile(std::string_view text);
std::string format_profile(const SignalProfile& p);

ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Renders every key, so parse_config(format_config(c)) reproduces c.
std::string format_config(const ScenarioConfig& config);

}  // namespace obslab
