#pragma once

#include "obslab/delay_line.hpp"
#include "obslab/landmarks.hpp"
#include "obslab/se2.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace obslab {

struct NoiseSettings {
  double sigma_landmark = 0.0;  // m
  double sigma_velocity = 0.0;  // m/s
  std::uint64_t seed = 1;
};

struct Scenario {
  LandmarkSet landmarks{{Vec2(1, 3), Vec2(3, 1), Vec2(4, 4)}};
  VelocityProfile profile;
  StateVector x0 = StateVector::Zero();
  StateVector x_hat0 = StateVector::Zero();
  double delay = 1.0;
  double dt = 1e-3;
  double t_end = 100.0;
  double epsilon = 0.6;
  double sigma_scale = 0.5;
  double p0_scale = 0.5;
  std::optional<NoiseSettings> noise;
  PhiWindow phi_window = PhiWindow::literal;
  /// Pre-tabulate the literal kernel over [0, D] from the angular-rate profile.
  bool prime_literal_table = true;
  double convergence_tol = 1e-2;
  double divergence_factor = 10.0;
  /// Spacing of recorded samples; verdicts always use every step.
  double record_interval = 0.01;
  bool pde_validate = false;
  int pde_cells = 200;
  /// Track the ODE-PDE error norm (always on with pde_validate), evaluated
  /// along characteristics every eq_interval seconds on <= 50 nodes.
  bool eq_norm = false;
  double eq_interval = 0.05;

  /// Throws obslab::Error on violated invariants (dt <= D/100 when D > 0,
  /// t_end > D, D a multiple of dt, positive gains).
  void validate() const;
};

/// Wheeled-robot reference scenario: landmarks (1,3), (3,1), (4,4);
/// w = 2 sin(0.04 pi t); v = (1, 0); X(0) = pose at 45 deg; P(0) = Sigma = 0.5 I.
Scenario wheeled_robot_scenario(double delay = 1.0, double epsilon = 0.6);

enum class ObserverKind { predictive, standard };
enum class ObserverSelection { predictive, standard, both };
enum class Verdict { converged, diverged, bounded_noise };

std::string_view to_string(ObserverKind k);
std::string_view to_string(Verdict v);
ObserverSelection parse_observer_selection(std::string_view s);

struct RunRecord {
  ObserverKind kind = ObserverKind::predictive;
  std::vector<double> t;
  std::vector<double> x_tilde_norm;
  std::vector<double> y_tilde_norm;
  std::vector<double> eq_norm;        // (|X~|^2 + int |U~|^2 dx)^(1/2); NaN between evaluations
  std::vector<double> pde_gap;        // |U^(0,t) - Y^(t)|_inf from the upwind co-simulation
  std::vector<double> lambda_min_p;
  std::vector<double> lambda_max_p;
  std::vector<StateVector> x;
  std::vector<StateVector> x_hat;

  Verdict verdict = Verdict::bounded_noise;
  double divergence_time = -1.0;
  double initial_error = 0.0;
  double final_error = 0.0;
  /// max |X~| over the final 10% (verdict window) and 20% (noise band).
  double tail_max = 0.0;
  double steady_band = 0.0;
  /// max over the whole run of the PDE / PDE-free output gap (inf-norm).
  double max_pde_gap = 0.0;
  double output_scale = 0.0;  // max |Y(t)|_inf, for relative gaps
  bool observability_ok = true;
  bool pseudo_inverse_used = false;
  std::vector<std::string> warnings;
};

/// Lockstep simulation: truth, delayed (noisy) measurements, observers.
/// Verdict: diverged once |X~| exceeds divergence_factor * |X~(0)|; otherwise
/// converged when |X~| < convergence_tol over the final 10% and no sensor
/// noise is active; otherwise bounded_noise.
std::vector<RunRecord> run(const Scenario& scenario, ObserverSelection which);
RunRecord run_one(const Scenario& scenario, ObserverKind kind);

struct SweepCell {
  double delay = 0.0;
  double epsilon = 0.0;
  Verdict verdict = Verdict::bounded_noise;
  double final_error = 0.0;
  double divergence_time = -1.0;
};

struct SweepResult {
  ObserverKind kind = ObserverKind::predictive;
  std::vector<SweepCell> cells;  // ordered by delay, then epsilon
  /// Per delay: smallest epsilon with verdict converged (NaN when none).
  std::vector<std::pair<double, double>> thresholds;
};

/// Grid of runs; `threads` workers (>= 1), results independent of the count.
SweepResult sweep(const Scenario& base, const std::vector<double>& delays,
                  const std::vector<double>& epsilons, ObserverKind kind = ObserverKind::predictive,
                  unsigned threads = 1);

struct NoiseStudyEntry {
  double delay = 0.0;
  Verdict verdict = Verdict::bounded_noise;
  double steady_band = 0.0;
};

/// Predictive runs with the scenario's noise settings at each delay. Bands
/// are the max |X~| over the final 20% of each run.
std::vector<NoiseStudyEntry> noise_study(const Scenario& base, const std::vector<double>& delays,
                                         unsigned threads = 1);

/// Thread count from OBSLAB_THREADS (default: hardware concurrency, min 1).
unsigned worker_threads_from_env();

}  // namespace obslab
