#pragma once

// Gain dynamics P' = -eps P - A(u)^T P - P A(u) + C^T Sigma C and the
// excitation constants bounding P from below.

#include "obslab/landmarks.hpp"
#include "obslab/se2.hpp"
#include "obslab/types.hpp"

namespace obslab {

struct GainState {
  Mat6 p = Mat6::Identity();
  double epsilon = 1.0;
  /// Output weight Sigma, 2N x 2N, SPD.
  MatX sigma;
};

/// Builds the initial gain state P(0) = p0_scale * I, Sigma = sigma_scale * I.
GainState make_gain_state(std::size_t landmark_count, double epsilon, double sigma_scale,
                          double p0_scale);

/// Right-hand side of the gain equation for a given information matrix C^T Sigma C.
Mat6 riccati_rhs(const Mat6& p, double omega, double epsilon, const Mat6& information);

/// C^T Sigma C.
Mat6 information_matrix(const OutputMatrix& c, const MatX& sigma);

/// One RK4 step (inputs sampled at t, t+dt/2, t+dt) followed by
/// symmetrization. Throws on non-finite entries.
GainState step_riccati(const GainState& state, const VelocityInput& u0, const VelocityInput& u_mid,
                       const VelocityInput& u1, const Mat6& information, double dt);

/// Constant-input convenience overload.
GainState step_riccati(const GainState& state, const VelocityInput& u, const OutputMatrix& c,
                       double dt);

struct GainInverse {
  Mat6 inverse;
  /// True when the Cholesky factorization failed and a pseudo-inverse was used.
  bool used_pseudo_inverse = false;
};

/// P^{-1} via Cholesky on the symmetrized matrix, pseudo-inverse fallback.
GainInverse invert_gain(const Mat6& p);

struct ExcitationConstants {
  double t_window = 0.0;
  double alpha = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  /// Smallest Gramian eigenvalue found at the accepted window.
  double gramian_min_eigenvalue = 0.0;
};

/// Observability Gramian over [t, t + window] by trapezoidal quadrature at
/// step dt, with Phi(tau, t) built from the exact integral of omega.
Mat6 observability_gramian(const OutputMatrix& c, const MatX& sigma, const VelocityProfile& profile,
                           double t, double window, double dt);

/// Grid search (step dt) for the smallest window T <= horizon whose Gramian
/// satisfies >= alpha * I at every sampled start time, then
/// beta1 = 2 T exp(-eps T) lambda_min(C^T Sigma C) and beta2 as the running
/// maximum eigenvalue of P(t) over [0, horizon] starting from `p0`.
/// Throws "insufficient excitation" if no window qualifies.
ExcitationConstants excitation_constants(const OutputMatrix& c, const MatX& sigma, double epsilon,
                                         const VelocityProfile& profile, double horizon, double dt,
                                         const Mat6& p0);

double min_eigenvalue(const Mat6& m);
double max_eigenvalue(const Mat6& m);

}  // namespace obslab
