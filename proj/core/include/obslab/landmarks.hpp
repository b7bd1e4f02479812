#pragma once

#include "obslab/se2.hpp"
#include "obslab/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace obslab {

/// Output matrix C, 2N x 6, row block i = [-I2, p_i1 I2, p_i2 I2].
using OutputMatrix = Eigen::Matrix<double, Eigen::Dynamic, 6>;

/// Known inertial-frame landmark locations.
class LandmarkSet {
 public:
  /// Throws if `points` is empty or contains non-finite coordinates.
  explicit LandmarkSet(std::vector<Vec2> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec2>& points() const { return points_; }
  /// True unless every point lies on one line (computed, not assumed).
  bool non_collinear() const { return non_collinear_; }

 private:
  std::vector<Vec2> points_;
  bool non_collinear_ = false;
};

OutputMatrix build_output_matrix(const LandmarkSet& landmarks);

/// Stacked q_i = R p_i - P, evaluated directly from the pose.
VecX measure(const Pose& pose, const LandmarkSet& landmarks);

struct ObservabilityReport {
  bool ok = false;
  int rank = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Numerical rank of C^T C with relative tolerance 1e-8.
ObservabilityReport observability_check(const LandmarkSet& landmarks);
ObservabilityReport observability_check(const OutputMatrix& c);

/// Standard normal deviates by the Marsaglia polar method on a 64-bit
/// Mersenne Twister. Both pieces are fully specified, so streams are
/// reproducible across standard libraries (unlike std::normal_distribution).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next();

  static constexpr const char* kAlgorithm = "mt19937_64 + Marsaglia polar";

 private:
  double uniform();  // in [-1, 1)

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct NoisyReadings {
  VecX y;
  VelocityInput u;
};

/// Adds i.i.d. zero-mean Gaussian noise to every landmark coordinate and to
/// both linear-velocity components. Angular velocity is left untouched.
NoisyReadings add_noise(const VecX& y, const VelocityInput& u, GaussianSource& source,
                        double sigma_landmark, double sigma_velocity);

/// Convenience overload that seeds a fresh source.
NoisyReadings add_noise(const VecX& y, const VelocityInput& u, std::uint64_t seed,
                        double sigma_landmark, double sigma_velocity);

}  // namespace obslab
