#pragma once

// Delay margin and gain-interval analysis for the predictive observer.
//
// Notation (all eigenvalues of 6x6 symmetric matrices):
//   lmin_ctsc  = lambda_min(C^T Sigma C)
//   lmax_ctc   = lambda_max(C^T C)
//   lmax_cts2c = lambda_max(C^T Sigma^2 C)
// Lyapunov-Krasovskii constants:
//   beta1  = 2 T exp(-eps T) lmin_ctsc
//   delta1 = eps beta1 + lmin_ctsc - k1 lmax_cts2c - D (D/2 + 1) gamma / (k1 k2) lmax_ctc
//   delta2 = 1 - (1 + D) k2,   rho = 1/k1,   mu = min(delta1/beta1, delta2/(1 + D))
// Gain inequality (k2 -> 1/(1+D)):
//   eps T exp(-eps T) >= upsilon2
//   upsilon2 = ( (D(D+1)(D+2) gamma lmax_ctc / k1 + 2 k1 lmax_cts2c) / (2 lmin_ctsc) - 1 ) / 2
// whose two Lambert-W roots bound eps, and whose solvability in D gives
//   D_max = 1/(3 s) + s - 1,   s = (u1/2 + sqrt(u1^2/4 - 1/27))^{1/3}
//   u1 = (2 lmin_ctsc (1 + 2/e) - 2 k1 lmax_cts2c) / (gamma lmax_ctc / k1).

#include "obslab/landmarks.hpp"
#include "obslab/profiles.hpp"
#include "obslab/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace obslab {

struct SpectralConstants {
  double lmin_ctsc = 0.0;
  double lmax_ctc = 0.0;
  double lmax_cts2c = 0.0;
  double lmin_ctc = 0.0;
};

SpectralConstants spectral_constants(const OutputMatrix& c, const MatX& sigma);

/// gamma = sup_t int_0^D |A(u(t + x - D)) - A(u(t))|_2^2 dx. The operator
/// 2-norm of the block-diagonal skew difference is |dw|, so the integrand is
/// (w(t + x - D) - w(t))^2. Trapezoid in x at step dt, grid in t over
/// [0, horizon] at step dt.
double compute_gamma(const SignalProfile& omega, double delay, double horizon, double dt);

struct MarginInputs {
  SpectralConstants spectra;
  double gamma = 0.0;
  double t_window = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 0.0;  // must be < 1/(1+D) for delta2 > 0
  double kappa3 = 1.0;
  double kappa4 = 1.0;
  double delay = 0.0;
  double epsilon = 0.0;
};

struct Theorem1Constants {
  double beta1 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  bool feasible = false;
};

double beta1_bound(const MarginInputs& in);
Theorem1Constants theorem1_constants(const MarginInputs& in);

/// Right side of the gain inequality.
double upsilon2(const MarginInputs& in);
/// Left side minus right side at `epsilon` (zero at interval endpoints).
double gain_inequality_residual(const MarginInputs& in, double epsilon);

enum class IntervalStatus { admissible, branch_point, unbounded, infeasible };
std::string_view to_string(IntervalStatus s);

struct EpsilonInterval {
  double upsilon2 = 0.0;
  double eps_min = 0.0;
  double eps_max = std::numeric_limits<double>::infinity();
  IntervalStatus status = IntervalStatus::infeasible;
  double residual_min = 0.0;  // gain inequality residual at the endpoints
  double residual_max = 0.0;
};

/// upsilon2 in (0, 1/e): admissible interval from W0 and W-1.
/// upsilon2 == 1/e: single point 1/T.  upsilon2 <= 0: every eps > 0 works
/// (eps_max = +inf).  upsilon2 > 1/e: infeasible.
EpsilonInterval epsilon_interval(const MarginInputs& in);

enum class DmaxStatus { bounded, unbounded, infeasible };
std::string_view to_string(DmaxStatus s);

struct DmaxResult {
  double upsilon1 = 0.0;
  double d_max = 0.0;
  /// Independent root of (D+1)^3 - (D+1) = upsilon1 by bisection.
  double d_max_bisection = 0.0;
  /// True when upsilon1^2/4 < 1/27, where the closed form runs through a
  /// complex cube root (three real cubic roots; the principal root is used).
  bool complex_cardano = false;
  DmaxStatus status = DmaxStatus::infeasible;
};

double upsilon1(const MarginInputs& in);
DmaxResult compute_dmax(const MarginInputs& in);

/// Rule for the upper V-bound constant. The coherent choice is the max of
/// beta2 and rho (1 + D); `literal_min` reproduces the printed min.
enum class UpperBoundRule { max, literal_min };

struct Theorem2Envelope {
  double v_phi1 = 0.0;  // min(beta1, rho)
  double v_phi2 = 0.0;  // max(beta2, rho (1 + D)) or min(...) per rule
  double w_phi1 = 0.0;  // 1 + k3
  double w_phi2 = 0.0;  // (1 + 1/k3) lmax_ctc D
  double w_phi3 = 0.0;  // 1 + k4
  double w_phi4 = 0.0;  // (1 + 1/k4) lmax_ctc D
  double psi1 = 0.0;
  double psi2 = 0.0;
  double overshoot = 0.0;
  double mu = 0.0;
  bool feasible = false;
};

Theorem2Envelope theorem2_envelope(const MarginInputs& in, double beta2,
                                   UpperBoundRule rule = UpperBoundRule::max);

/// Log-spaced kappa1 grid over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);

/// kappa1 minimizing upsilon2 (the gain inequality's right side) on a log grid.
double kappa1_minimizing_upsilon2(const MarginInputs& in, double lo = 1e-3, double hi = 1e3,
                                  int points = 601);
/// kappa1 maximizing upsilon1 (hence D_max) on a log grid.
double kappa1_maximizing_dmax(const MarginInputs& in, double lo = 1e-3, double hi = 1e3,
                              int points = 601);

/// Whether some (kappa1, kappa2, eps) on the given grids makes delta1 > 0 and
/// delta2 > 0 at the inputs' delay.
bool theorem1_feasible_somewhere(const MarginInputs& in, const std::vector<double>& kappa1_grid,
                                 const std::vector<double>& kappa2_fractions,
                                 const std::vector<double>& eps_grid);

struct MarginReport {
  // inputs, echoed for provenance
  double delay = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double t_window = 0.0;
  double kappa1 = 0.0;
  double kappa1_dmax = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double beta2 = 0.0;
  SpectralConstants spectra;
  // results
  double beta1 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double upsilon1 = 0.0;
  double upsilon2 = 0.0;
  double d_max = 0.0;
  double d_max_bisection = 0.0;
  DmaxStatus d_max_status = DmaxStatus::infeasible;
  double eps_min = 0.0;
  double eps_max = 0.0;
  IntervalStatus eps_status = IntervalStatus::infeasible;
  double eps_residual_min = 0.0;
  double eps_residual_max = 0.0;
  double overshoot = 0.0;
  bool feasible = false;
};

/// Assembles every constant. The gain interval, decay constants and envelope
/// use `in.kappa1`; D_max uses `kappa1_dmax`.
MarginReport build_margin_report(const MarginInputs& in, double kappa1_dmax, double beta2,
                                 UpperBoundRule rule = UpperBoundRule::max);

/// Flat "key = value" rendering, one entry per line.
std::string format_margin_report(const MarginReport& r);

}  // namespace obslab
