#pragma once

// Planar rigid-body kinematics on SE(2) and its embedding into R^6.
//
// Conventions follow the linear form X' = A(w) X + B(v) with
//   A(w) = -blockdiag(S(w), S(w), S(w)),  B(v) = [v; 0; 0],
//   X = [P; r1; r2],  R = [r1 r2],
// where P is the inertial position expressed in the body frame. The pose
// kinematics are therefore R' = -S(w) R and P' = -S(w) P + v.

#include "obslab/profiles.hpp"
#include "obslab/types.hpp"

#include <functional>

namespace obslab {

/// Element of SO(2).
class Rotation2 {
 public:
  Rotation2() : m_(Mat2::Identity()) {}

  /// Counter-clockwise rotation by `angle` radians.
  static Rotation2 from_angle(double angle);
  /// Wraps `m` after checking orthonormality (tolerance 1e-9).
  static Rotation2 from_matrix(const Mat2& m);
  /// Nearest rotation to an arbitrary 2x2 matrix: normalize the first column
  /// and take its perpendicular.
  static Rotation2 project(const Mat2& m);

  const Mat2& matrix() const { return m_; }
  double angle() const;

  Rotation2 operator*(const Rotation2& other) const;
  Vec2 operator*(const Vec2& v) const { return m_ * v; }
  Rotation2 transpose() const;

 private:
  explicit Rotation2(const Mat2& m) : m_(m) {}
  Mat2 m_;
};

struct Pose {
  Rotation2 rotation;
  Vec2 position = Vec2::Zero();
};

struct VelocityInput {
  double omega = 0.0;
  Vec2 v = Vec2::Zero();

  bool finite() const { return std::isfinite(omega) && v.allFinite(); }
};

/// Time-varying velocity input built from analytic signal profiles.
struct VelocityProfile {
  SignalProfile omega;
  SignalProfile vx;
  SignalProfile vy;

  VelocityInput at(double t) const { return {omega.value(t), Vec2(vx.value(t), vy.value(t))}; }
  /// Exact integral of omega over [t0, t1].
  double omega_integral(double t0, double t1) const { return omega.integral(t0, t1); }
};

using VelocityFunction = std::function<VelocityInput(double)>;

/// State transition matrix of X' = A(w) X. Every 2x2 diagonal block is the
/// same rotation, so only that block is stored.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(const Rotation2& block) : block_(block) {}

  const Rotation2& block() const { return block_; }
  Mat6 expand() const;
  Vec6 apply(const Vec6& x) const;
  /// Applies the block to each consecutive pair of `x` (any even length).
  VecX apply_pairs(const VecX& x) const;

  TransitionMatrix operator*(const TransitionMatrix& other) const {
    return TransitionMatrix(block_ * other.block_);
  }
  TransitionMatrix transpose() const { return TransitionMatrix(block_.transpose()); }

 private:
  Rotation2 block_;
};

/// S(w) = [0 -w; w 0].
Mat2 skew(double omega);

StateVector embed(const Pose& pose);
/// Inverse of embed. The rotation block is taken as-is and must be orthonormal.
Pose unembed(const StateVector& x);

struct SystemMatrices {
  Mat6 a;
  Vec6 b;
};

SystemMatrices system_matrices(const VelocityInput& u);

/// A(u) x + B(u), exploiting the block structure.
Vec6 state_derivative(const Vec6& x, const VelocityInput& u);

/// Phi for a given accumulated angle int(w dt): blocks are rotations by
/// -omega_integral.
TransitionMatrix transition(double omega_integral);

/// Fixed-step RK4 on the pose kinematics with re-projection of the rotation
/// onto SO(2) after each step. The last step is shortened to land on t1.
Pose integrate_pose(const Pose& pose, const VelocityFunction& u_profile, double t0, double t1,
                    double dt);

/// One RK4 step of the pose kinematics using inputs sampled at t, t+dt/2, t+dt.
Pose rk4_pose_step(const Pose& pose, const VelocityInput& u0, const VelocityInput& u_mid,
                   const VelocityInput& u1, double dt);

}  // namespace obslab
