#pragma once

// Scenario-level margin analysis: gathers gamma, the excitation window and
// beta2 from the scenario, picks kappa1, and assembles the margin report.

#include "obslab/config.hpp"
#include "obslab/margins.hpp"
#include "obslab/riccati.hpp"

#include <string>

namespace obslab {

struct MarginStudy {
  MarginReport report;
  ExcitationConstants excitation;
  std::string kappa1_source;      // "auto" or "config"
  std::string t_window_source;    // "excitation search" or "config"
  double gamma_dt = 0.0;
  /// Whether delta1, delta2 > 0 for some kappa1, kappa2, eps on the search
  /// grids at the configured delay.
  bool theorem1_feasible = false;
};

MarginStudy analyze_margins(const ScenarioConfig& config);

/// margin report plus the provenance lines of the study.
std::string format_margin_study(const MarginStudy& study);

}  // namespace obslab
