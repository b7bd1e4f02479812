#include "obslab/margins.hpp"

#include "obslab/delay_line.hpp"
#include "obslab/lambert_w.hpp"
#include "obslab/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace obslab {

namespace {

constexpr double kInvE = 0.36787944117144233;

double sym_eig(const Mat6& m, bool want_max) {
  const Mat6 s = 0.5 * (m + m.transpose());
  return want_max ? max_eigenvalue(s) : min_eigenvalue(s);
}

}  // namespace

SpectralConstants spectral_constants(const OutputMatrix& c, const MatX& sigma) {
  SpectralConstants s;
  const Mat6 ctc = c.transpose() * c;
  const Mat6 ctsc = c.transpose() * sigma * c;
  const Mat6 cts2c = c.transpose() * sigma * sigma * c;
  s.lmin_ctsc = sym_eig(ctsc, false);
  s.lmax_ctc = sym_eig(ctc, true);
  s.lmin_ctc = sym_eig(ctc, false);
  s.lmax_cts2c = sym_eig(cts2c, true);
  return s;
}

double compute_gamma(const SignalProfile& omega, double delay, double horizon, double dt) {
  if (!(delay > 0.0)) throw Error("compute_gamma: delay must be positive");
  if (!(dt > 0.0) || horizon < 0.0) throw Error("compute_gamma: need dt > 0 and horizon >= 0");
  const std::size_t m = delay_steps(delay, dt);
  const auto n_t = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  // w sampled at tau_i = -D + i dt, i = 0 .. m + n_t.
  std::vector<double> w(m + n_t + 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = omega.value(-delay + static_cast<double>(i) * dt);
  }
  double best = 0.0;
  for (std::size_t k = 0; k <= n_t; ++k) {
    // t = k dt sits at index k + m; x_j = j dt maps to index k + j.
    const double wt = w[k + m];
    double acc = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
      const double d = w[k + j] - wt;
      const double weight = (j == 0 || j == m) ? 0.5 : 1.0;
      acc += weight * d * d;
    }
    best = std::max(best, acc * dt);
  }
  return best;
}

double beta1_bound(const MarginInputs& in) {
  return 2.0 * in.t_window * std::exp(-in.epsilon * in.t_window) * in.spectra.lmin_ctsc;
}

Theorem1Constants theorem1_constants(const MarginInputs& in) {
  Theorem1Constants out;
  const auto& s = in.spectra;
  const double d = in.delay;
  out.beta1 = beta1_bound(in);
  out.rho = 1.0 / in.kappa1;
  out.delta1 = in.epsilon * out.beta1 + s.lmin_ctsc - in.kappa1 * s.lmax_cts2c -
               d * (d / 2.0 + 1.0) * in.gamma / (in.kappa1 * in.kappa2) * s.lmax_ctc;
  out.delta2 = 1.0 - (1.0 + d) * in.kappa2;
  out.mu = std::min(out.delta1 / out.beta1, out.delta2 / (1.0 + d));
  out.feasible = out.delta1 > 0.0 && out.delta2 > 0.0;
  return out;
}

double upsilon2(const MarginInputs& in) {
  const auto& s = in.spectra;
  const double d = in.delay;
  const double num = d * (d + 1.0) * (d + 2.0) * in.gamma * s.lmax_ctc / in.kappa1 +
                     2.0 * in.kappa1 * s.lmax_cts2c;
  return 0.5 * (num / (2.0 * s.lmin_ctsc) - 1.0);
}

double gain_inequality_residual(const MarginInputs& in, double epsilon) {
  const double et = epsilon * in.t_window;
  return et * std::exp(-et) - upsilon2(in);
}

std::string_view to_string(IntervalStatus s) {
  switch (s) {
    case IntervalStatus::admissible: return "admissible";
    case IntervalStatus::branch_point: return "branch_point";
    case IntervalStatus::unbounded: return "unbounded";
    case IntervalStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

EpsilonInterval epsilon_interval(const MarginInputs& in) {
  if (!(in.t_window > 0.0)) throw Error("epsilon_interval: T must be positive");
  EpsilonInterval out;
  out.upsilon2 = upsilon2(in);
  const double t = in.t_window;
  if (out.upsilon2 <= 0.0) {
    out.status = IntervalStatus::unbounded;
    out.eps_min = 0.0;
    out.eps_max = std::numeric_limits<double>::infinity();
    return out;
  }
  if (out.upsilon2 > kInvE) {
    out.status = IntervalStatus::infeasible;
    out.eps_min = std::numeric_limits<double>::quiet_NaN();
    out.eps_max = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.eps_min = -lambert_w(-out.upsilon2, LambertBranch::principal) / t;
  out.eps_max = -lambert_w(-out.upsilon2, LambertBranch::minus_one) / t;
  out.status = out.eps_min < out.eps_max ? IntervalStatus::admissible : IntervalStatus::branch_point;
  out.residual_min = gain_inequality_residual(in, out.eps_min);
  out.residual_max = gain_inequality_residual(in, out.eps_max);
  return out;
}

std::string_view to_string(DmaxStatus s) {
  switch (s) {
    case DmaxStatus::bounded: return "bounded";
    case DmaxStatus::unbounded: return "unbounded";
    case DmaxStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

double upsilon1(const MarginInputs& in) {
  const auto& s = in.spectra;
  const double num = 2.0 * s.lmin_ctsc * (1.0 + 2.0 / std::numbers::e) - 2.0 * in.kappa1 * s.lmax_cts2c;
  return num / (in.gamma * s.lmax_ctc / in.kappa1);
}

DmaxResult compute_dmax(const MarginInputs& in) {
  DmaxResult out;
  if (in.gamma == 0.0) {
    out.upsilon1 = std::numeric_limits<double>::infinity();
    out.d_max = out.d_max_bisection = std::numeric_limits<double>::infinity();
    out.status = DmaxStatus::unbounded;
    return out;
  }
  out.upsilon1 = upsilon1(in);
  if (!(out.upsilon1 > 0.0)) {
    out.status = DmaxStatus::infeasible;
    out.d_max = out.d_max_bisection = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double u = out.upsilon1;
  const double disc = u * u / 4.0 - 1.0 / 27.0;
  out.complex_cardano = disc < 0.0;
  const std::complex<double> inner = u / 2.0 + std::sqrt(std::complex<double>(disc, 0.0));
  const std::complex<double> s = std::pow(inner, 1.0 / 3.0);
  out.d_max = (1.0 / (3.0 * s) + s - 1.0).real();

  // s^3 - s = u has exactly one root above 1 for u > 0.
  auto f = [u](double x) { return x * x * x - x - u; };
  double lo = 1.0;
  double hi = 2.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  out.d_max_bisection = 0.5 * (lo + hi) - 1.0;
  out.status = DmaxStatus::bounded;
  return out;
}

Theorem2Envelope theorem2_envelope(const MarginInputs& in, double beta2, UpperBoundRule rule) {
  const Theorem1Constants t1 = theorem1_constants(in);
  Theorem2Envelope out;
  const double d = in.delay;
  const double lmax = in.spectra.lmax_ctc;
  out.v_phi1 = std::min(t1.beta1, t1.rho);
  out.v_phi2 = rule == UpperBoundRule::max ? std::max(beta2, t1.rho * (1.0 + d))
                                           : std::min(beta2, t1.rho * (1.0 + d));
  out.w_phi1 = 1.0 + in.kappa3;
  out.w_phi2 = (1.0 + 1.0 / in.kappa3) * lmax * d;
  out.w_phi3 = 1.0 + in.kappa4;
  out.w_phi4 = (1.0 + 1.0 / in.kappa4) * lmax * d;
  out.psi1 = 1.0 / std::max(out.w_phi3, 1.0 + out.w_phi4);
  out.psi2 = std::max(out.w_phi1, 1.0 + out.w_phi2);
  out.overshoot = std::sqrt(out.v_phi2 * out.psi2 / (out.v_phi1 * out.psi1));
  out.mu = t1.mu;
  out.feasible = t1.feasible;
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    g.push_back(std::pow(10.0, a + (b - a) * i / std::max(1, points - 1)));
  }
  return g;
}

double kappa1_minimizing_upsilon2(const MarginInputs& in, double lo, double hi, int points) {
  MarginInputs trial = in;
  double best_k = lo;
  double best = std::numeric_limits<double>::infinity();
  for (double k : log_grid(lo, hi, points)) {
    trial.kappa1 = k;
    const double v = upsilon2(trial);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  return best_k;
}

double kappa1_maximizing_dmax(const MarginInputs& in, double lo, double hi, int points) {
  MarginInputs trial = in;
  trial.gamma = in.gamma > 0.0 ? in.gamma : 1.0;  // argmax does not depend on gamma
  double best_k = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (double k : log_grid(lo, hi, points)) {
    trial.kappa1 = k;
    const double v = upsilon1(trial);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  return best_k;
}

bool theorem1_feasible_somewhere(const MarginInputs& in, const std::vector<double>& kappa1_grid,
                                 const std::vector<double>& kappa2_fractions,
                                 const std::vector<double>& eps_grid) {
  MarginInputs trial = in;
  for (double k1 : kappa1_grid) {
    trial.kappa1 = k1;
    for (double frac : kappa2_fractions) {
      trial.kappa2 = frac / (1.0 + in.delay);
      for (double eps : eps_grid) {
        trial.epsilon = eps;
        if (theorem1_constants(trial).feasible) return true;
      }
    }
  }
  return false;
}

MarginReport build_margin_report(const MarginInputs& in, double kappa1_dmax, double beta2,
                                 UpperBoundRule rule) {
  MarginReport r;
  r.delay = in.delay;
  r.epsilon = in.epsilon;
  r.gamma = in.gamma;
  r.t_window = in.t_window;
  r.kappa1 = in.kappa1;
  r.kappa1_dmax = kappa1_dmax;
  r.kappa2 = in.kappa2;
  r.kappa3 = in.kappa3;
  r.kappa4 = in.kappa4;
  r.beta2 = beta2;
  r.spectra = in.spectra;

  const Theorem1Constants t1 = theorem1_constants(in);
  r.beta1 = t1.beta1;
  r.delta1 = t1.delta1;
  r.delta2 = t1.delta2;
  r.rho = t1.rho;
  r.mu = t1.mu;

  MarginInputs dm = in;
  dm.kappa1 = kappa1_dmax;
  const DmaxResult dmax = compute_dmax(dm);
  r.upsilon1 = dmax.upsilon1;
  r.d_max = dmax.d_max;
  r.d_max_bisection = dmax.d_max_bisection;
  r.d_max_status = dmax.status;

  const EpsilonInterval eps = epsilon_interval(in);
  r.upsilon2 = eps.upsilon2;
  r.eps_min = eps.eps_min;
  r.eps_max = eps.eps_max;
  r.eps_status = eps.status;
  r.eps_residual_min = eps.residual_min;
  r.eps_residual_max = eps.residual_max;

  r.overshoot = theorem2_envelope(in, beta2, rule).overshoot;

  const bool delay_ok = dmax.status == DmaxStatus::unbounded ||
                        (dmax.status == DmaxStatus::bounded && in.delay < dmax.d_max);
  const bool gain_ok = eps.status == IntervalStatus::admissible || eps.status == IntervalStatus::unbounded;
  r.feasible = delay_ok && gain_ok;
  return r;
}

std::string format_margin_report(const MarginReport& r) {
  std::ostringstream os;
  os.precision(10);
  auto kv = [&os](std::string_view k, auto v) { os << k << " = " << v << '\n'; };
  kv("delay_s", r.delay);
  kv("epsilon", r.epsilon);
  kv("gamma", r.gamma);
  kv("t_window_s", r.t_window);
  kv("kappa1", r.kappa1);
  kv("kappa1_dmax", r.kappa1_dmax);
  kv("kappa2", r.kappa2);
  kv("kappa3", r.kappa3);
  kv("kappa4", r.kappa4);
  kv("lambda_min_CtSigmaC", r.spectra.lmin_ctsc);
  kv("lambda_max_CtC", r.spectra.lmax_ctc);
  kv("lambda_max_CtSigma2C", r.spectra.lmax_cts2c);
  kv("beta1", r.beta1);
  kv("beta2", r.beta2);
  kv("delta1", r.delta1);
  kv("delta2", r.delta2);
  kv("rho", r.rho);
  kv("mu", r.mu);
  kv("upsilon1", r.upsilon1);
  kv("d_max_s", r.d_max);
  kv("d_max_bisection_s", r.d_max_bisection);
  kv("d_max_status", to_string(r.d_max_status));
  kv("upsilon2", r.upsilon2);
  kv("eps_min", r.eps_min);
  kv("eps_max", r.eps_max);
  kv("eps_status", to_string(r.eps_status));
  kv("eps_residual_at_min", r.eps_residual_min);
  kv("eps_residual_at_max", r.eps_residual_max);
  kv("overshoot", r.overshoot);
  kv("feasible", r.feasible ? "true" : "false");
  return os.str();
}

}  // namespace obslab
