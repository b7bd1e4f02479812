#include "obslab/observers.hpp"

namespace obslab {

namespace {

void check_measurement(const OutputMatrix& c, const VecX& y) {
  if (y.size() != c.rows()) throw Error("measurement size does not match the output matrix");
  if (!y.allFinite()) throw Error("measurement has non-finite entries");
}

void check_state(const StateVector& x, double t) {
  if (!x.allFinite()) throw Error("observer state became non-finite at t=" + std::to_string(t));
}

}  // namespace

StateVector rk4_state_step(const StateVector& x, const StepInputs& u, const Vec6& injection, double dt) {
  const Vec6 k1 = state_derivative(x, u.start) + injection;
  const Vec6 k2 = state_derivative(x + 0.5 * dt * k1, u.mid) + injection;
  const Vec6 k3 = state_derivative(x + 0.5 * dt * k2, u.mid) + injection;
  const Vec6 k4 = state_derivative(x + dt * k3, u.end) + injection;
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------

PredictiveObserver::PredictiveObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                                       const ObserverSettings& settings, double omega0, double t0)
    : c_(std::move(c)),
      ct_sigma_(c_.transpose() * gain.sigma),
      information_(information_matrix(c_, gain.sigma)),
      gain_(std::move(gain)),
      x_hat_(x_hat0),
      settings_(settings),
      t_(t0),
      x_hat_line_(settings.dt, settings.delay, VecX(VecX::Zero(6))),
      residual_line_(settings.dt, settings.delay, VecX(VecX::Zero(6))),
      y_hat_line_(settings.dt, settings.delay, VecX(VecX::Zero(c_.rows()))),
      omega_(settings.dt, settings.delay) {
  (void)delay_steps(settings.delay, settings.dt);
  check_state(x_hat_, t_);
  x_hat_line_.push(t_, x_hat_);
  omega_.advance(t_, omega0, omega0);
}

VecX PredictiveObserver::predictive_output() const {
  const double d = settings_.delay;
  const Vec6 delayed = x_hat_line_.query(t_ - d);
  if (d == 0.0) return c_ * delayed;
  const Vec6 integral = convolve_history(residual_line_, omega_, t_, d, settings_.phi_window);
  return c_ * (delayed + integral);
}

StepReport PredictiveObserver::step(const VecX& y_measured, const StepInputs& u) {
  check_measurement(c_, y_measured);
  StepReport report;
  report.t = t_;
  report.y_hat = predictive_output();
  report.residual = y_measured - report.y_hat;

  const GainInverse inv = invert_gain(gain_.p);
  report.used_pseudo_inverse = inv.used_pseudo_inverse;
  const Vec6 f = inv.inverse * (ct_sigma_ * report.residual);
  residual_line_.push(t_, f);
  y_hat_line_.push(t_, report.y_hat);

  const Vec6 injection = omega_.injection_transition(settings_.phi_window).apply(f);
  const double dt = settings_.dt;
  x_hat_ = rk4_state_step(x_hat_, u, injection, dt);
  gain_ = step_riccati(gain_, u.start, u.mid, u.end, information_, dt);
  t_ += dt;
  check_state(x_hat_, t_);
  x_hat_line_.push(t_, x_hat_);
  omega_.advance(t_, u.start.omega, u.end.omega);
  return report;
}

// ---------------------------------------------------------------------------

StandardObserver::StandardObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                                   const ObserverSettings& settings, double t0)
    : c_(std::move(c)),
      ct_sigma_(c_.transpose() * gain.sigma),
      information_(information_matrix(c_, gain.sigma)),
      gain_(std::move(gain)),
      x_hat_(x_hat0),
      settings_(settings),
      t_(t0),
      x_hat_line_(settings.dt, settings.delay, VecX(VecX::Zero(6))) {
  (void)delay_steps(settings.delay, settings.dt);
  check_state(x_hat_, t_);
  x_hat_line_.push(t_, x_hat_);
}

VecX StandardObserver::output() const {
  return c_ * Vec6(x_hat_line_.query(t_ - settings_.delay));
}

StepReport StandardObserver::step(const VecX& y_measured, const StepInputs& u) {
  check_measurement(c_, y_measured);
  StepReport report;
  report.t = t_;
  report.y_hat = output();
  report.residual = y_measured - report.y_hat;

  const GainInverse inv = invert_gain(gain_.p);
  report.used_pseudo_inverse = inv.used_pseudo_inverse;
  const Vec6 injection = inv.inverse * (ct_sigma_ * report.residual);

  const double dt = settings_.dt;
  x_hat_ = rk4_state_step(x_hat_, u, injection, dt);
  gain_ = step_riccati(gain_, u.start, u.mid, u.end, information_, dt);
  t_ += dt;
  check_state(x_hat_, t_);
  x_hat_line_.push(t_, x_hat_);
  return report;
}

}  // namespace obslab
