#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace obslab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Embedded planar pose, ordered [P; r1; r2].
using StateVector = Vec6;

/// Error raised for violated preconditions and numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Eigen::Ref<const MatX>& m) { return m.allFinite(); }

}  // namespace obslab
