#include "obslab/se2.hpp"

#include <cmath>

namespace obslab {

Rotation2 Rotation2::from_angle(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 m;
  m << c, -s, s, c;
  return Rotation2(m);
}

Rotation2 Rotation2::from_matrix(const Mat2& m) {
  if (!m.allFinite()) throw Error("rotation matrix has non-finite entries");
  if ((m.transpose() * m - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(m.determinant() - 1.0) > 1e-9) {
    throw Error("matrix is not in SO(2)");
  }
  return Rotation2(m);
}

Rotation2 Rotation2::project(const Mat2& m) {
  Vec2 c0 = m.col(0);
  const double n = c0.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("cannot project degenerate matrix onto SO(2)");
  c0 /= n;
  Mat2 r;
  r << c0.x(), -c0.y(), c0.y(), c0.x();
  return Rotation2(r);
}

double Rotation2::angle() const { return std::atan2(m_(1, 0), m_(0, 0)); }

Rotation2 Rotation2::operator*(const Rotation2& other) const { return Rotation2(m_ * other.m_); }

Rotation2 Rotation2::transpose() const { return Rotation2(m_.transpose()); }

Mat6 TransitionMatrix::expand() const {
  Mat6 m = Mat6::Zero();
  for (int k = 0; k < 3; ++k) m.block<2, 2>(2 * k, 2 * k) = block_.matrix();
  return m;
}

Vec6 TransitionMatrix::apply(const Vec6& x) const {
  Vec6 y;
  const Mat2& r = block_.matrix();
  for (int k = 0; k < 3; ++k) y.segment<2>(2 * k) = r * x.segment<2>(2 * k);
  return y;
}

VecX TransitionMatrix::apply_pairs(const VecX& x) const {
  if (x.size() % 2 != 0) throw Error("apply_pairs requires an even-length vector");
  VecX y(x.size());
  const Mat2& r = block_.matrix();
  for (Eigen::Index k = 0; k < x.size(); k += 2) y.segment<2>(k) = r * x.segment<2>(k);
  return y;
}

Mat2 skew(double omega) {
  Mat2 s;
  s << 0.0, -omega, omega, 0.0;
  return s;
}

StateVector embed(const Pose& pose) {
  StateVector x;
  x.segment<2>(0) = pose.position;
  x.segment<2>(2) = pose.rotation.matrix().col(0);
  x.segment<2>(4) = pose.rotation.matrix().col(1);
  return x;
}

Pose unembed(const StateVector& x) {
  Mat2 r;
  r.col(0) = x.segment<2>(2);
  r.col(1) = x.segment<2>(4);
  return {Rotation2::from_matrix(r), x.segment<2>(0)};
}

SystemMatrices system_matrices(const VelocityInput& u) {
  SystemMatrices m{Mat6::Zero(), Vec6::Zero()};
  const Mat2 s = skew(u.omega);
  for (int k = 0; k < 3; ++k) m.a.block<2, 2>(2 * k, 2 * k) = -s;
  m.b.segment<2>(0) = u.v;
  return m;
}

Vec6 state_derivative(const Vec6& x, const VelocityInput& u) {
  // -S(w) [a; b] = [w b; -w a]
  Vec6 d;
  for (int k = 0; k < 3; ++k) {
    d(2 * k) = u.omega * x(2 * k + 1);
    d(2 * k + 1) = -u.omega * x(2 * k);
  }
  d.segment<2>(0) += u.v;
  return d;
}

TransitionMatrix transition(double omega_integral) {
  return TransitionMatrix(Rotation2::from_angle(-omega_integral));
}

Pose rk4_pose_step(const Pose& pose, const VelocityInput& u0, const VelocityInput& u_mid,
                   const VelocityInput& u1, double dt) {
  // Integrate in the embedded coordinates; R' = -S R and P' = -S P + v are
  // exactly the linear form on X.
  const Vec6 x = embed(pose);
  const Vec6 k1 = state_derivative(x, u0);
  const Vec6 k2 = state_derivative(x + 0.5 * dt * k1, u_mid);
  const Vec6 k3 = state_derivative(x + 0.5 * dt * k2, u_mid);
  const Vec6 k4 = state_derivative(x + dt * k3, u1);
  const Vec6 next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw Error("pose integration produced non-finite state");
  Mat2 r;
  r.col(0) = next.segment<2>(2);
  r.col(1) = next.segment<2>(4);
  return {Rotation2::project(r), next.segment<2>(0)};
}

Pose integrate_pose(const Pose& pose, const VelocityFunction& u_profile, double t0, double t1,
                    double dt) {
  if (!(dt > 0.0)) throw Error("integrate_pose: dt must be positive");
  if (t1 < t0) throw Error("integrate_pose: t1 < t0");
  auto sample = [&](double t) {
    VelocityInput u = u_profile(t);
    if (!u.finite()) throw Error("integrate_pose: velocity profile returned non-finite value");
    return u;
  };
  Pose p = pose;
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  for (long i = 0; i < steps; ++i) {
    const double ta = t0 + static_cast<double>(i) * dt;
    const double h = std::min(dt, t1 - ta);
    if (h <= 0.0) break;
    p = rk4_pose_step(p, sample(ta), sample(ta + 0.5 * h), sample(ta + h), h);
  }
  return p;
}

}  // namespace obslab
