#pragma once

// Method-of-lines co-simulation of the ODE-PDE observer
//   X^' = A X^ + B + Phi_inj g(t),          g = P^{-1} C^T Sigma (Y - U^(0,t))
//   U^_t = U^_x + C Phi_node(x, t) g(t),    U^(D,t) = C X^(t)
// on nodes x_j = j D / m, with first-order upwind differencing (information
// travels from x = D toward x = 0). Used as an independent oracle for the
// PDE-free predictive observer and to evaluate the error norm
//   ( |X~|^2 + int_0^D |U~(x)|^2 dx )^{1/2}.

#include "obslab/delay_line.hpp"
#include "obslab/landmarks.hpp"
#include "obslab/observers.hpp"
#include "obslab/riccati.hpp"

#include <functional>
#include <vector>

namespace obslab {

struct TransportGrid {
  double delay = 0.0;
  int cells = 0;
  std::vector<VecX> nodes;  // cells + 1 values, node j at x = j * dx()

  TransportGrid() = default;
  TransportGrid(double delay, int cells, const VecX& initial);

  double dx() const { return delay / cells; }
  double x(int j) const { return dx() * j; }
};

/// Per-node source strength: returns the 2N-vector added to dU/dt at node j.
using NodeSource = std::function<VecX(int node)>;

/// One explicit upwind step: U_j += dt/dx (U_{j+1} - U_j) + dt * source(j),
/// then U_m = boundary. Throws when dt > dx (CFL).
void step_transport(TransportGrid& grid, const VecX& boundary, const NodeSource& source, double dt);

/// Omega(s) = int_0^s w as a function of absolute time.
using OmegaIntegralFunction = std::function<double(double)>;

/// Kernel angle for a source emitted at time t at node x (the rotation blocks
/// of Phi_node are rot(-angle)). literal: Omega(x); sliding: Omega(t+x) - Omega(t).
double transport_node_angle(PhiWindow window, const OmegaIntegralFunction& omega_integral, double x, double t);

/// ODE-PDE realization of the predictive observer.
class OdePdeObserver {
 public:
  OdePdeObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                 const ObserverSettings& settings, int cells, OmegaIntegralFunction omega_integral,
                 double t0 = 0.0);

  /// U^(0, t): the observer's estimate of the delayed output.
  const VecX& boundary_output() const { return grid_.nodes.front(); }
  StepReport step(const VecX& y_measured, const StepInputs& u);

  double time() const { return t_; }
  const StateVector& x_hat() const { return x_hat_; }
  const GainState& gain() const { return gain_; }
  const TransportGrid& grid() const { return grid_; }

  /// Kernel angle for node x at time t (angle of the rotation blocks of
  /// Phi_node is minus this value).
  double node_angle(double x, double t) const;
  double injection_angle(double t) const;

 private:
  OutputMatrix c_;
  MatX ct_sigma_;
  Mat6 information_;
  GainState gain_;
  StateVector x_hat_;
  ObserverSettings settings_;
  TransportGrid grid_;
  OmegaIntegralFunction omega_integral_;
  double t_;
};

/// U^(x_j, t) on `cells` nodes evaluated along characteristics from the
/// PDE-free observer's histories, with no spatial discretization:
///   U^(x,t) = C X^(t+x-D) + int_{t+x-D}^{t} C Phi_node(x+t-s, s) f(s) ds
/// (trapezoid at dt; f(t) is taken as the newest stored residual, matching the
/// observer's explicit endpoint). D / cells must be a multiple of dt.
TransportGrid characteristic_grid(const PredictiveObserver& observer,
                                  const OmegaIntegralFunction& omega_integral, int cells);

/// Truth-side transport state sampled exactly from the state history:
/// U(x_j, t) = C X(t + x_j - D).
TransportGrid sample_truth_grid(const DelayLine& truth_states, const OutputMatrix& c, double t,
                                double delay, int cells);

/// ( |X~|^2 + int_0^D |U_truth - U_obs|^2 dx )^{1/2} with trapezoidal weights.
double error_norm(const TransportGrid& grid_truth, const TransportGrid& grid_obs, const Vec6& x_tilde);

/// W~(x_j) = U~(x_j) - C Phi(x_j, D) X~ with Phi(x, D) = rot(-(Omega(x) - Omega(D)))
/// blockwise (literal anchoring).
std::vector<VecX> composite_error(const TransportGrid& grid_truth, const TransportGrid& grid_obs,
                                  const Vec6& x_tilde, const OutputMatrix& c,
                                  const OmegaIntegralFunction& omega_integral);

}  // namespace obslab
