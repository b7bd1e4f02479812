#include "obslab/analysis.hpp"

#include "obslab/delay_line.hpp"

#include <cmath>
#include <sstream>

namespace obslab {

namespace {

// Keeps the gamma quadrature under ~2000 points per window.
double gamma_step(double delay, double dt) {
  if (delay <= 0.0) return dt;
  const std::size_t steps = delay_steps(delay, dt);
  if (steps <= 2000) return dt;
  std::size_t stride = (steps + 1999) / 2000;
  while (steps % stride != 0) ++stride;
  return dt * static_cast<double>(stride);
}

}  // namespace

MarginStudy analyze_margins(const ScenarioConfig& config) {
  const Scenario& s = config.scenario;
  if (!(s.delay > 0.0)) throw Error("margin analysis needs a positive delay");
  const OutputMatrix c = build_output_matrix(s.landmarks);
  const GainState g = make_gain_state(s.landmarks.size(), s.epsilon, s.sigma_scale, s.p0_scale);

  MarginStudy study;
  study.gamma_dt = gamma_step(s.delay, s.dt);

  MarginInputs in;
  in.spectra = spectral_constants(c, g.sigma);
  in.gamma = compute_gamma(s.profile.omega, s.delay, config.margin.horizon, study.gamma_dt);
  in.delay = s.delay;
  in.epsilon = s.epsilon;
  in.kappa2 = 1.0 / (2.0 * (1.0 + s.delay));
  in.kappa3 = 1.0;
  in.kappa4 = 1.0;

  study.excitation = excitation_constants(c, g.sigma, s.epsilon, s.profile, config.margin.horizon, s.dt, g.p);
  if (config.margin.t_window) {
    in.t_window = *config.margin.t_window;
    study.t_window_source = "config";
  } else {
    in.t_window = study.excitation.t_window;
    study.t_window_source = "excitation search";
  }

  double kappa1_dmax = 0.0;
  if (config.margin.kappa1) {
    in.kappa1 = *config.margin.kappa1;
    kappa1_dmax = in.kappa1;
    study.kappa1_source = "config";
  } else {
    in.kappa1 = kappa1_minimizing_upsilon2(in);
    kappa1_dmax = kappa1_maximizing_dmax(in);
    study.kappa1_source = "auto";
  }

  study.report = build_margin_report(in, kappa1_dmax, study.excitation.beta2, config.margin.rule);
  study.theorem1_feasible = theorem1_feasible_somewhere(in, log_grid(1e-3, 1e3, 121),
                                                        {0.1, 0.25, 0.5, 0.75, 0.9},
                                                        log_grid(1e-2, 1e2, 81));
  return study;
}

std::string format_margin_study(const MarginStudy& study) {
  std::ostringstream os;
  os.precision(10);
  os << format_margin_report(study.report);
  os << "kappa1_source = " << study.kappa1_source << '\n';
  os << "kappa1_grid = log[1e-3, 1e3] x 601\n";
  os << "t_window_source = " << study.t_window_source << '\n';
  os << "excitation_alpha = " << study.excitation.alpha << '\n';
  os << "gramian_min_eigenvalue = " << study.excitation.gramian_min_eigenvalue << '\n';
  os << "gamma_dt_s = " << study.gamma_dt << '\n';
  os << "theorem1_feasible_somewhere = " << (study.theorem1_feasible ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace obslab
