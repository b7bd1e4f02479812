#include "obslab/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace obslab {

double min_eigenvalue(const Mat6& m) {
  return Eigen::SelfAdjointEigenSolver<Mat6>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double max_eigenvalue(const Mat6& m) {
  return Eigen::SelfAdjointEigenSolver<Mat6>(m, Eigen::EigenvaluesOnly).eigenvalues()(5);
}

GainState make_gain_state(std::size_t landmark_count, double epsilon, double sigma_scale,
                          double p0_scale) {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(sigma_scale > 0.0) || !(p0_scale > 0.0)) throw Error("Sigma and P(0) scales must be positive");
  const auto m = static_cast<Eigen::Index>(2 * landmark_count);
  return {p0_scale * Mat6::Identity(), epsilon, sigma_scale * MatX::Identity(m, m)};
}

Mat6 information_matrix(const OutputMatrix& c, const MatX& sigma) {
  if (sigma.rows() != c.rows() || sigma.cols() != c.rows()) {
    throw Error("Sigma dimensions do not match the output matrix");
  }
  Mat6 info = c.transpose() * sigma * c;
  return 0.5 * (info + info.transpose());
}

Mat6 riccati_rhs(const Mat6& p, double omega, double epsilon, const Mat6& information) {
  const Mat6 a = system_matrices({omega, Vec2::Zero()}).a;
  return -epsilon * p - a.transpose() * p - p * a + information;
}

GainState step_riccati(const GainState& state, const VelocityInput& u0, const VelocityInput& u_mid,
                       const VelocityInput& u1, const Mat6& information, double dt) {
  if (!(dt > 0.0)) throw Error("step_riccati: dt must be positive");
  const double eps = state.epsilon;
  const Mat6& p = state.p;
  const Mat6 k1 = riccati_rhs(p, u0.omega, eps, information);
  const Mat6 k2 = riccati_rhs(p + 0.5 * dt * k1, u_mid.omega, eps, information);
  const Mat6 k3 = riccati_rhs(p + 0.5 * dt * k2, u_mid.omega, eps, information);
  const Mat6 k4 = riccati_rhs(p + dt * k3, u1.omega, eps, information);
  GainState next = state;
  next.p = p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.p = 0.5 * (next.p + next.p.transpose());
  if (!next.p.allFinite()) throw Error("gain equation produced non-finite entries");
  return next;
}

GainState step_riccati(const GainState& state, const VelocityInput& u, const OutputMatrix& c,
                       double dt) {
  return step_riccati(state, u, u, u, information_matrix(c, state.sigma), dt);
}

GainInverse invert_gain(const Mat6& p) {
  const Mat6 sym = 0.5 * (p + p.transpose());
  Eigen::LLT<Mat6> llt(sym);
  if (llt.info() == Eigen::Success) {
    return {llt.solve(Mat6::Identity()), false};
  }
  return {sym.completeOrthogonalDecomposition().pseudoInverse(), true};
}

Mat6 observability_gramian(const OutputMatrix& c, const MatX& sigma, const VelocityProfile& profile,
                           double t, double window, double dt) {
  const Mat6 info = information_matrix(c, sigma);
  const auto n = std::max<long>(1, std::lround(window / dt));
  const double h = window / static_cast<double>(n);
  Mat6 g = Mat6::Zero();
  for (long k = 0; k <= n; ++k) {
    const double tau = t + static_cast<double>(k) * h;
    const Mat6 phi = transition(profile.omega_integral(t, tau)).expand();
    const double w = (k == 0 || k == n) ? 0.5 * h : h;
    g += w * phi.transpose() * info * phi;
  }
  return 0.5 * (g + g.transpose());
}

ExcitationConstants excitation_constants(const OutputMatrix& c, const MatX& sigma, double epsilon,
                                         const VelocityProfile& profile, double horizon, double dt,
                                         const Mat6& p0) {
  if (!(dt > 0.0) || !(horizon > dt)) throw Error("excitation_constants: need 0 < dt < horizon");
  const auto obs = observability_check(c);
  if (!obs.ok) throw Error("insufficient excitation: output matrix is not observable");

  const Mat6 info = information_matrix(c, sigma);
  const double lambda_sigma =
      Eigen::SelfAdjointEigenSolver<MatX>(sigma, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double lambda_ctc = obs.min_eigenvalue;
  const double alpha_rate = lambda_sigma * lambda_ctc;
  constexpr double kRelTol = 1e-9;
  constexpr int kStartSamples = 50;

  // Gramians for all sampled start times, grown one step at a time.
  std::vector<double> starts;
  for (int i = 0; i < kStartSamples; ++i) {
    starts.push_back(horizon * static_cast<double>(i) / kStartSamples);
  }
  std::vector<Mat6> gram(starts.size(), Mat6::Zero());
  std::vector<Mat6> last_term(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) last_term[i] = info;

  ExcitationConstants out;
  const auto max_steps = static_cast<long>(std::floor(horizon / dt));
  bool found = false;
  for (long k = 1; k <= max_steps && !found; ++k) {
    const double window = static_cast<double>(k) * dt;
    const double alpha = window * alpha_rate;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const Mat6 phi = transition(profile.omega_integral(starts[i], starts[i] + window)).expand();
      const Mat6 term = phi.transpose() * info * phi;
      gram[i] += 0.5 * dt * (last_term[i] + term);
      last_term[i] = term;
      worst = std::min(worst, min_eigenvalue(0.5 * (gram[i] + gram[i].transpose())));
    }
    if (worst >= alpha * (1.0 - kRelTol)) {
      found = true;
      out.t_window = window;
      out.alpha = alpha;
      out.gramian_min_eigenvalue = worst;
    }
  }
  if (!found) throw Error("insufficient excitation: Gramian bound not met within the horizon");

  out.beta1 = 2.0 * out.t_window * std::exp(-epsilon * out.t_window) * min_eigenvalue(info);

  GainState gs{p0, epsilon, sigma};
  double beta2 = max_eigenvalue(p0);
  for (long k = 0; k < max_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    gs = step_riccati(gs, profile.at(t), profile.at(t + 0.5 * dt), profile.at(t + dt), info, dt);
    beta2 = std::max(beta2, max_eigenvalue(gs.p));
  }
  out.beta2 = beta2;
  return out;
}

}  // namespace obslab
