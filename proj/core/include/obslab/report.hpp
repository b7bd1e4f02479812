#pragma once

// Run artifacts: CSV tables, a self-contained SVG error plot and the plain
// text run summary. Everything here is a pure function of its inputs, so
// repeated runs produce byte-identical files.

#include "obslab/config.hpp"
#include "obslab/sim.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace obslab {

inline constexpr std::string_view kRunCsvSchema = "obslab-run-csv/1";
inline constexpr std::string_view kSweepCsvSchema = "obslab-sweep-csv/1";

/// Long format, one row per observer per recorded sample:
/// observer,t_s,x_tilde_norm,y_tilde_norm,eq_norm,pde_gap,lambda_min_P,lambda_max_P,x1..x6,x_hat1..x_hat6
/// eq_norm is empty unless tracked; pde_gap is empty unless ODE-PDE validation ran.
void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// delay_s,epsilon_per_s,verdict,final_error,divergence_time_s, followed by
/// "# threshold" comment lines (smallest converged epsilon per delay).
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// log10 |X~| against time, one polyline per record.
std::string render_error_svg(const std::vector<RunRecord>& records, std::string_view title);

/// Verdicts, errors and warnings, followed by the full configuration echo.
std::string format_run_summary(const std::vector<RunRecord>& records, const ScenarioConfig& config);

}  // namespace obslab
