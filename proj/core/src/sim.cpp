#include "obslab/sim.hpp"

#include "obslab/observers.hpp"
#include "obslab/riccati.hpp"
#include "obslab/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

namespace obslab {

std::string_view to_string(ObserverKind k) { return k == ObserverKind::predictive ? "predictive" : "standard"; }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged: return "diverged";
    case Verdict::bounded_noise: return "bounded_noise";
  }
  return "unknown";
}

ObserverSelection parse_observer_selection(std::string_view s) {
  if (s == "predictive") return ObserverSelection::predictive;
  if (s == "standard") return ObserverSelection::standard;
  if (s == "both") return ObserverSelection::both;
  throw Error("observer must be predictive, standard or both");
}

void Scenario::validate() const {
  if (!(dt > 0.0)) throw Error("dt_s must be positive");
  if (delay < 0.0) throw Error("delay_s must be non-negative");
  if (delay > 0.0 && dt > delay / 100.0 * (1.0 + 1e-12)) throw Error("dt_s must be <= delay_s / 100");
  (void)delay_steps(delay, dt);
  if (!(t_end > delay)) throw Error("t_end_s must exceed delay_s");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(sigma_scale > 0.0) || !(p0_scale > 0.0)) throw Error("sigma_scale and p0_scale must be positive");
  if (!(convergence_tol > 0.0) || !(divergence_factor > 1.0)) throw Error("bad verdict thresholds");
  if (!(record_interval > 0.0)) throw Error("record_interval_s must be positive");
  if (noise && (noise->sigma_landmark < 0.0 || noise->sigma_velocity < 0.0)) {
    throw Error("noise sigmas must be non-negative");
  }
  if (eq_norm && !(delay > 0.0)) throw Error("eq_norm tracking needs a positive delay");
  if (!(eq_interval > 0.0)) throw Error("eq_interval_s must be positive");
  if (pde_validate) {
    if (!(delay > 0.0)) throw Error("pde validation needs a positive delay");
    if (pde_cells < 1) throw Error("pde_cells must be positive");
    if (dt > delay / pde_cells * (1.0 + 1e-12)) throw Error("pde validation violates CFL: dt > D / cells");
  }
  if (!x0.allFinite() || !x_hat0.allFinite()) throw Error("initial states must be finite");
}

Scenario wheeled_robot_scenario(double delay, double epsilon) {
  Scenario s;
  s.profile.omega = SignalProfile::sine(2.0, 0.02);  // 2 sin(0.04 pi t)
  s.profile.vx = SignalProfile::constant(1.0);
  s.profile.vy = SignalProfile::constant(0.0);
  const double h = std::numbers::sqrt2 / 2.0;
  s.x0 << -5.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2, h, h, -h, h;
  s.delay = delay;
  s.epsilon = epsilon;
  return s;
}

namespace {

struct Slot {
  ObserverKind kind;
  std::optional<PredictiveObserver> predictive;
  std::optional<StandardObserver> standard;
  std::optional<OdePdeObserver> ode_pde;
  RunRecord record;
  bool active = true;
  double tail_max = 0.0;
  double band = 0.0;
};

std::vector<double> literal_table(const SignalProfile& omega, double dt, std::size_t steps) {
  // Same trapezoid accumulation the observer performs online.
  std::vector<double> table(steps + 1, 0.0);
  double prev = omega.value(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double now = omega.value(static_cast<double>(k) * dt);
    table[k] = table[k - 1] + 0.5 * dt * (prev + now);
    prev = now;
  }
  return table;
}

}  // namespace

std::vector<RunRecord> run(const Scenario& scenario, ObserverSelection which) {
  scenario.validate();
  const OutputMatrix c = build_output_matrix(scenario.landmarks);
  const auto obs = observability_check(c);
  const double dt = scenario.dt;
  const double d = scenario.delay;
  const std::size_t m = delay_steps(d, dt);
  const auto n_steps = static_cast<long>(std::llround(scenario.t_end / dt));
  const auto record_every = std::max<long>(1, std::lround(scenario.record_interval / dt));
  const VelocityProfile& prof = scenario.profile;

  ObserverSettings settings{d, dt, scenario.phi_window};
  const GainState gain0 =
      make_gain_state(scenario.landmarks.size(), scenario.epsilon, scenario.sigma_scale, scenario.p0_scale);

  std::vector<Slot> slots;
  auto add_slot = [&](ObserverKind kind) {
    Slot s{kind, std::nullopt, std::nullopt, std::nullopt, {}, true, 0.0, 0.0};
    if (kind == ObserverKind::predictive) {
      s.predictive.emplace(c, gain0, scenario.x_hat0, settings, prof.omega.value(0.0));
      if (scenario.prime_literal_table && scenario.phi_window == PhiWindow::literal) {
        s.predictive->prime_literal_table(literal_table(prof.omega, dt, m));
      }
      if (scenario.pde_validate) {
        s.ode_pde.emplace(c, gain0, scenario.x_hat0, settings, scenario.pde_cells,
                          [&prof](double t) { return prof.omega_integral(0.0, t); });
      }
    } else {
      s.standard.emplace(c, gain0, scenario.x_hat0, settings);
    }
    s.record.kind = kind;
    s.record.observability_ok = obs.ok;
    if (!obs.ok) {
      s.record.warnings.push_back("observability: FAILED (rank " + std::to_string(obs.rank) + " of 6)");
    }
    slots.push_back(std::move(s));
  };
  if (which != ObserverSelection::standard) add_slot(ObserverKind::predictive);
  if (which != ObserverSelection::predictive) add_slot(ObserverKind::standard);

  Pose pose = unembed(scenario.x0);
  DelayLine truth(dt, d + dt, VecX(scenario.x0));
  std::optional<GaussianSource> noise;
  if (scenario.noise) noise.emplace(scenario.noise->seed);

  const bool track_eq = (scenario.eq_norm || scenario.pde_validate) && d > 0.0;
  const OmegaIntegralFunction omega_integral = [&prof](double t) { return prof.omega_integral(0.0, t); };
  int eq_cells = 1;
  if (track_eq) {
    std::size_t stride = (m + 49) / 50;
    while (m % stride != 0) ++stride;
    eq_cells = static_cast<int>(m / stride);
  }
  const auto eq_every = std::max<long>(1, std::lround(scenario.eq_interval / dt));

  const double initial_error = (scenario.x0 - scenario.x_hat0).norm();
  const double diverge_at = scenario.divergence_factor * std::max(initial_error, 1e-12);
  const long tail10_start = n_steps - n_steps / 10;
  const long tail20_start = n_steps - n_steps / 5;
  double output_scale = 0.0;

  for (long n = 0; n <= n_steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const StateVector x = embed(pose);
    truth.push(t, x);
    const VecX y_clean = c * Vec6(truth.query(t - d));
    output_scale = std::max(output_scale, y_clean.cwiseAbs().maxCoeff());

    StepInputs u{prof.at(t), prof.at(t + 0.5 * dt), prof.at(t + dt)};
    VecX y = y_clean;
    if (noise) {
      const NoisyReadings r =
          add_noise(y_clean, u.start, *noise, scenario.noise->sigma_landmark, scenario.noise->sigma_velocity);
      y = r.y;
      const Vec2 dv = r.u.v - u.start.v;
      u.start.v += dv;
      u.mid.v += dv;
      u.end.v += dv;
    }

    bool any_active = false;
    const bool last = n == n_steps;
    const bool record_now = n % record_every == 0 || last;
    for (auto& s : slots) {
      if (!s.active) continue;
      any_active = true;
      auto& rec = s.record;
      const StateVector x_hat = s.predictive ? s.predictive->x_hat() : s.standard->x_hat();
      const Mat6 p = s.predictive ? s.predictive->gain().p : s.standard->gain().p;
      const double err = (x - x_hat).norm();
      if (n == 0) rec.initial_error = err;
      if (n >= tail10_start) s.tail_max = std::max(s.tail_max, err);
      if (n >= tail20_start) s.band = std::max(s.band, err);

      double eq = std::numeric_limits<double>::quiet_NaN();
      if (track_eq && s.predictive && record_now && (n % eq_every == 0 || last)) {
        const TransportGrid truth_grid = sample_truth_grid(truth, c, t, d, eq_cells);
        eq = error_norm(truth_grid, characteristic_grid(*s.predictive, omega_integral, eq_cells), x - x_hat);
      }

      StepReport report;
      std::optional<StepReport> pde_report;
      bool blew_up = !std::isfinite(err) || err > diverge_at;
      if (!blew_up && !last) {
        try {
          report = s.predictive ? s.predictive->step(y, u) : s.standard->step(y, u);
          if (s.ode_pde) pde_report = s.ode_pde->step(y, u);
        } catch (const Error& ex) {
          rec.warnings.push_back(std::string("step failed at t=") + std::to_string(t) + ": " + ex.what());
          blew_up = true;
        }
      } else if (last) {
        report.y_hat = s.predictive ? s.predictive->predictive_output() : s.standard->output();
        report.residual = y - report.y_hat;
        if (s.ode_pde) {
          pde_report = StepReport{t, s.ode_pde->boundary_output(), y - s.ode_pde->boundary_output(), false};
        }
      }
      if (report.used_pseudo_inverse && !rec.pseudo_inverse_used) {
        rec.pseudo_inverse_used = true;
        rec.warnings.push_back("gain matrix not SPD at t=" + std::to_string(t) + "; pseudo-inverse used");
      }
      double gap = std::numeric_limits<double>::quiet_NaN();
      if (pde_report && report.y_hat.size() > 0) {
        gap = (pde_report->y_hat - report.y_hat).cwiseAbs().maxCoeff();
        rec.max_pde_gap = std::max(rec.max_pde_gap, gap);
      }

      if (record_now || blew_up) {
        rec.t.push_back(t);
        rec.x_tilde_norm.push_back(err);
        rec.y_tilde_norm.push_back(report.residual.size() > 0 ? report.residual.norm()
                                                              : std::numeric_limits<double>::quiet_NaN());
        Eigen::SelfAdjointEigenSolver<Mat6> eig(p, Eigen::EigenvaluesOnly);
        rec.lambda_min_p.push_back(eig.eigenvalues()(0));
        rec.lambda_max_p.push_back(eig.eigenvalues()(5));
        rec.x.push_back(x);
        rec.x_hat.push_back(x_hat);
        if (s.ode_pde) rec.pde_gap.push_back(gap);
        if (track_eq && s.predictive) rec.eq_norm.push_back(eq);
      }
      if (blew_up) {
        rec.verdict = Verdict::diverged;
        rec.divergence_time = t;
        s.active = false;
      }
    }
    if (!any_active) break;
    if (n < n_steps) pose = rk4_pose_step(pose, prof.at(t), prof.at(t + 0.5 * dt), prof.at(t + dt), dt);
  }

  const bool noisy =
      scenario.noise && (scenario.noise->sigma_landmark > 0.0 || scenario.noise->sigma_velocity > 0.0);
  std::vector<RunRecord> out;
  for (auto& s : slots) {
    auto& rec = s.record;
    rec.output_scale = output_scale;
    rec.final_error = rec.x_tilde_norm.empty() ? 0.0 : rec.x_tilde_norm.back();
    rec.tail_max = s.tail_max;
    rec.steady_band = s.band;
    if (rec.verdict != Verdict::diverged) {
      // With live sensor noise the error has a floor, so it never converges.
      rec.verdict = s.tail_max < scenario.convergence_tol && !noisy ? Verdict::converged : Verdict::bounded_noise;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

RunRecord run_one(const Scenario& scenario, ObserverKind kind) {
  auto records = run(scenario, kind == ObserverKind::predictive ? ObserverSelection::predictive
                                                                : ObserverSelection::standard);
  return std::move(records.front());
}

unsigned worker_threads_from_env() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OBSLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace {

template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

SweepResult sweep(const Scenario& base, const std::vector<double>& delays,
                  const std::vector<double>& epsilons, ObserverKind kind, unsigned threads) {
  if (delays.empty() || epsilons.empty()) throw Error("sweep needs non-empty delay and gain lists");
  SweepResult result;
  result.kind = kind;
  result.cells.resize(delays.size() * epsilons.size());
  parallel_for(result.cells.size(), threads, [&](std::size_t i) {
    Scenario s = base;
    s.delay = delays[i / epsilons.size()];
    s.epsilon = epsilons[i % epsilons.size()];
    s.pde_validate = false;
    const RunRecord r = run_one(s, kind);
    result.cells[i] = {s.delay, s.epsilon, r.verdict, r.final_error, r.divergence_time};
  });
  for (std::size_t di = 0; di < delays.size(); ++di) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t ei = 0; ei < epsilons.size(); ++ei) {
      const auto& cell = result.cells[di * epsilons.size() + ei];
      if (cell.verdict == Verdict::converged && (std::isnan(best) || cell.epsilon < best)) best = cell.epsilon;
    }
    result.thresholds.emplace_back(delays[di], best);
  }
  return result;
}

std::vector<NoiseStudyEntry> noise_study(const Scenario& base, const std::vector<double>& delays,
                                         unsigned threads) {
  std::vector<NoiseStudyEntry> out(delays.size());
  parallel_for(delays.size(), threads, [&](std::size_t i) {
    Scenario s = base;
    s.delay = delays[i];
    const RunRecord r = run_one(s, ObserverKind::predictive);
    out[i] = {delays[i], r.verdict, r.steady_band};
  });
  return out;
}

}  // namespace obslab
