#include "obslab/transport.hpp"

#include <cmath>

namespace obslab {

TransportGrid::TransportGrid(double delay_, int cells_, const VecX& initial)
    : delay(delay_), cells(cells_), nodes(static_cast<std::size_t>(cells_) + 1, initial) {
  if (!(delay_ > 0.0)) throw Error("transport grid needs a positive delay");
  if (cells_ < 1) throw Error("transport grid needs at least one cell");
}

void step_transport(TransportGrid& grid, const VecX& boundary, const NodeSource& source, double dt) {
  const double dx = grid.dx();
  if (dt > dx * (1.0 + 1e-12)) throw Error("transport step violates CFL (dt > dx)");
  const double courant = dt / dx;
  const int m = grid.cells;
  for (int j = 0; j < m; ++j) {
    auto& u = grid.nodes[static_cast<std::size_t>(j)];
    const auto& right = grid.nodes[static_cast<std::size_t>(j) + 1];
    u += courant * (right - u);
    if (source) u += dt * source(j);
  }
  grid.nodes[static_cast<std::size_t>(m)] = boundary;
}

// ---------------------------------------------------------------------------

OdePdeObserver::OdePdeObserver(OutputMatrix c, GainState gain, const StateVector& x_hat0,
                               const ObserverSettings& settings, int cells,
                               OmegaIntegralFunction omega_integral, double t0)
    : c_(std::move(c)),
      ct_sigma_(c_.transpose() * gain.sigma),
      information_(information_matrix(c_, gain.sigma)),
      gain_(std::move(gain)),
      x_hat_(x_hat0),
      settings_(settings),
      grid_(settings.delay, cells, VecX::Zero(c_.rows())),
      omega_integral_(std::move(omega_integral)),
      t_(t0) {
  grid_.nodes.back() = c_ * x_hat_;
}

double transport_node_angle(PhiWindow window, const OmegaIntegralFunction& omega_integral, double x, double t) {
  if (window == PhiWindow::literal) return omega_integral(x);
  // Source emitted now at node x reaches x = 0 at time t + x, where the
  // sliding kernel integrates w over [t, t + x].
  return omega_integral(t + x) - omega_integral(t);
}

double OdePdeObserver::node_angle(double x, double t) const {
  return transport_node_angle(settings_.phi_window, omega_integral_, x, t);
}

double OdePdeObserver::injection_angle(double t) const {
  if (settings_.phi_window == PhiWindow::literal) return omega_integral_(settings_.delay);
  return omega_integral_(t) - omega_integral_(t - settings_.delay);
}

StepReport OdePdeObserver::step(const VecX& y_measured, const StepInputs& u) {
  StepReport report;
  report.t = t_;
  report.y_hat = grid_.nodes.front();
  report.residual = y_measured - report.y_hat;

  const GainInverse inv = invert_gain(gain_.p);
  report.used_pseudo_inverse = inv.used_pseudo_inverse;
  const Vec6 g = inv.inverse * (ct_sigma_ * report.residual);
  const Vec6 injection = transition(injection_angle(t_)).apply(g);

  const double dt = settings_.dt;
  x_hat_ = rk4_state_step(x_hat_, u, injection, dt);
  gain_ = step_riccati(gain_, u.start, u.mid, u.end, information_, dt);

  const double t_now = t_;
  auto source = [&](int j) -> VecX {
    return c_ * transition(node_angle(grid_.x(j), t_now)).apply(g);
  };
  step_transport(grid_, c_ * x_hat_, source, dt);
  t_ += dt;
  if (!x_hat_.allFinite()) throw Error("ODE-PDE observer became non-finite");
  return report;
}

// ---------------------------------------------------------------------------

TransportGrid characteristic_grid(const PredictiveObserver& observer,
                                  const OmegaIntegralFunction& omega_integral, int cells) {
  const ObserverSettings& set = observer.settings();
  const OutputMatrix& c = observer.output_matrix();
  const double d = set.delay;
  const double dt = set.dt;
  const double t = observer.time();
  const std::size_t m = delay_steps(d, dt);
  if (cells < 1 || m % static_cast<std::size_t>(cells) != 0) {
    throw Error("characteristic_grid: D / cells must be a multiple of dt");
  }
  const std::size_t stride = m / static_cast<std::size_t>(cells);
  const DelayLine& f_line = observer.residual_history();
  const bool f_current = !f_line.empty() && std::abs(f_line.newest_time() - t) < 0.5 * dt;

  // f at s_k = t - k dt, k = 0..m; the s = t sample reuses the newest residual.
  std::vector<Vec6> f(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const std::size_t back = f_current ? k : (k == 0 ? 0 : k - 1);
    f[k] = f_line.back(back);
  }

  TransportGrid grid(d, cells, VecX::Zero(c.rows()));
  auto rotate = [](double angle, const Vec6& v) {
    const Mat2 r = Rotation2::from_angle(-angle).matrix();
    Vec6 out;
    for (int b = 0; b < 3; ++b) out.segment<2>(2 * b) = r * v.segment<2>(2 * b);
    return out;
  };

  if (set.phi_window == PhiWindow::literal) {
    // Kernel depends on xi = x + t - s = x_j + k dt only.
    std::vector<Mat2> kernel(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
      kernel[i] = Rotation2::from_angle(-omega_integral(static_cast<double>(i) * dt)).matrix();
    }
    for (int j = 0; j <= cells; ++j) {
      const std::size_t xj = static_cast<std::size_t>(j) * stride;
      const std::size_t kmax = m - xj;
      Vec6 acc = Vec6::Zero();
      for (std::size_t k = 0; k <= kmax && kmax > 0; ++k) {
        const double w = (k == 0 || k == kmax) ? 0.5 * dt : dt;
        const Mat2& r = kernel[xj + k];
        for (int b = 0; b < 3; ++b) acc.segment<2>(2 * b) += w * (r * f[k].segment<2>(2 * b));
      }
      const double x = static_cast<double>(xj) * dt;
      grid.nodes[static_cast<std::size_t>(j)] = c * (Vec6(observer.x_hat_history().query(t + x - d)) + acc);
    }
    return grid;
  }

  // Sliding: rot(-(Omega(t+x) - Omega(s))) = rot(-Omega(t+x)) rot(Omega(s)),
  // so prefix sums of rot(Omega(s_k)) f(s_k) serve every node.
  std::vector<Vec6> g(m + 1);
  for (std::size_t k = 0; k <= m; ++k) g[k] = rotate(-omega_integral(t - static_cast<double>(k) * dt), f[k]);
  std::vector<Vec6> prefix(m + 2, Vec6::Zero());
  for (std::size_t k = 0; k <= m; ++k) prefix[k + 1] = prefix[k] + g[k];
  for (int j = 0; j <= cells; ++j) {
    const std::size_t xj = static_cast<std::size_t>(j) * stride;
    const std::size_t kmax = m - xj;
    Vec6 acc = Vec6::Zero();
    if (kmax > 0) acc = dt * (prefix[kmax + 1] - prefix[0]) - 0.5 * dt * (g[0] + g[kmax]);
    const double x = static_cast<double>(xj) * dt;
    acc = rotate(omega_integral(t + x), acc);
    grid.nodes[static_cast<std::size_t>(j)] = c * (Vec6(observer.x_hat_history().query(t + x - d)) + acc);
  }
  return grid;
}

TransportGrid sample_truth_grid(const DelayLine& truth_states, const OutputMatrix& c, double t,
                                double delay, int cells) {
  TransportGrid grid(delay, cells, VecX::Zero(c.rows()));
  for (int j = 0; j <= cells; ++j) {
    grid.nodes[static_cast<std::size_t>(j)] = c * Vec6(truth_states.query(t + grid.x(j) - delay));
  }
  return grid;
}

double error_norm(const TransportGrid& grid_truth, const TransportGrid& grid_obs, const Vec6& x_tilde) {
  if (grid_truth.nodes.size() != grid_obs.nodes.size()) throw Error("error_norm: grids not aligned");
  const double dx = grid_truth.dx();
  double integral = 0.0;
  const std::size_t n = grid_truth.nodes.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 * dx : dx;
    integral += w * (grid_truth.nodes[j] - grid_obs.nodes[j]).squaredNorm();
  }
  return std::sqrt(x_tilde.squaredNorm() + integral);
}

std::vector<VecX> composite_error(const TransportGrid& grid_truth, const TransportGrid& grid_obs,
                                  const Vec6& x_tilde, const OutputMatrix& c,
                                  const OmegaIntegralFunction& omega_integral) {
  if (grid_truth.nodes.size() != grid_obs.nodes.size()) throw Error("composite_error: grids not aligned");
  const double omega_d = omega_integral(grid_truth.delay);
  std::vector<VecX> w(grid_truth.nodes.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double x = grid_truth.x(static_cast<int>(j));
    const double angle = j + 1 == w.size() ? 0.0 : omega_integral(x) - omega_d;
    w[j] = grid_truth.nodes[j] - grid_obs.nodes[j] - c * transition(angle).apply(x_tilde);
  }
  return w;
}

}  // namespace obslab
