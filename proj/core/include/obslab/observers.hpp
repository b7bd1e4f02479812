#pragma once

// Delay-compensating observers for X' = A(u) X + B(u), Y(t) = C X(t - D).
//
// Predictive (PDE-free realization of the ODE-PDE observer):
//   X^' = A X^ + B + Phi_inj P^{-1} C^T Sigma (Y - Y^)
//   Y^(t) = C X^(t-D) + C int_{t-D}^t Phi(t,theta) P^{-1}(theta) C^T Sigma (Y - Y^)(theta) dtheta
// Standard (no prediction):
//   X^' = A X^ + B + P^{-1} C^T Sigma (Y - Y^),   Y^(t) = C X^(t-D)
// Both share the gain equation of riccati.hpp.
//
// Each step runs from t to t + dt with the output injection held constant
// over the step. The theta = t endpoint of the distributed integral reuses
// the previous step's residual, so Y^(t) is explicit.

#include "obslab/delay_line.hpp"
#include "obslab/landmarks.hpp"
#include "obslab/riccati.hpp"
#include "obslab/se2.hpp"

namespace obslab {

/// Inputs sampled at t, t + dt/2 and t + dt for one RK4 step.
struct StepInputs {
  VelocityInput start;
  VelocityInput mid;
  VelocityInput end;

  static StepInputs constant(const VelocityInput& u) { return {u, u, u}; }
};

struct ObserverSettings {
  double delay = 0.0;
  double dt = 1e-3;
  PhiWindow phi_window = PhiWindow::literal;
};

/// What one observer step saw at its start time.
struct StepReport {
  double t = 0.0;
  VecX y_hat;       // Y^(t)
  VecX residual;    // Y(t) - Y^(t)
  bool used_pseudo_inverse = false;
};

class PredictiveObserver {
 public:
  PredictiveObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                     const ObserverSettings& settings, double omega0, double t0 = 0.0);

  /// Y^(t) at the current time, using the histories as they stand.
  VecX predictive_output() const;

  /// Advances from t to t + dt given the (possibly noisy) delayed measurement
  /// Y(t) and the measured inputs over the step.
  StepReport step(const VecX& y_measured, const StepInputs& u);

  /// Pre-tabulates the literal kernel's Omega over [0, D].
  void prime_literal_table(std::vector<double> table) { omega_.prime_early(std::move(table)); }

  double time() const { return t_; }
  const StateVector& x_hat() const { return x_hat_; }
  const GainState& gain() const { return gain_; }
  const OutputMatrix& output_matrix() const { return c_; }
  const ObserverSettings& settings() const { return settings_; }
  const DelayLine& x_hat_history() const { return x_hat_line_; }
  const DelayLine& residual_history() const { return residual_line_; }
  const DelayLine& y_hat_history() const { return y_hat_line_; }
  const OmegaIntegralHistory& omega_history() const { return omega_; }

 private:
  OutputMatrix c_;
  MatX ct_sigma_;
  Mat6 information_;
  GainState gain_;
  StateVector x_hat_;
  ObserverSettings settings_;
  double t_;
  DelayLine x_hat_line_;
  DelayLine residual_line_;  // P^{-1} C^T Sigma (Y - Y^)
  DelayLine y_hat_line_;
  OmegaIntegralHistory omega_;
};

class StandardObserver {
 public:
  StandardObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                   const ObserverSettings& settings, double t0 = 0.0);

  VecX output() const;
  StepReport step(const VecX& y_measured, const StepInputs& u);

  double time() const { return t_; }
  const StateVector& x_hat() const { return x_hat_; }
  const GainState& gain() const { return gain_; }
  const DelayLine& x_hat_history() const { return x_hat_line_; }

 private:
  OutputMatrix c_;
  MatX ct_sigma_;
  Mat6 information_;
  GainState gain_;
  StateVector x_hat_;
  ObserverSettings settings_;
  double t_;
  DelayLine x_hat_line_;
};

/// RK4 step of X' = A(u) X + B(u) + injection with the injection held fixed.
StateVector rk4_state_step(const StateVector& x, const StepInputs& u, const Vec6& injection, double dt);

}  // namespace obslab
