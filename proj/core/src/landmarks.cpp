#include "obslab/landmarks.hpp"

#include <cmath>

namespace obslab {

LandmarkSet::LandmarkSet(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error("landmark set is empty");
  for (const auto& p : points_) {
    if (!p.allFinite()) throw Error("landmark coordinates must be finite");
  }
  // Non-collinear iff some triple spans a triangle of non-zero area.
  const double scale = [&] {
    double s = 1.0;
    for (const auto& p : points_) s = std::max(s, p.cwiseAbs().maxCoeff());
    return s;
  }();
  for (std::size_t i = 0; i < points_.size() && !non_collinear_; ++i) {
    for (std::size_t j = i + 1; j < points_.size() && !non_collinear_; ++j) {
      for (std::size_t k = j + 1; k < points_.size(); ++k) {
        const Vec2 a = points_[j] - points_[i];
        const Vec2 b = points_[k] - points_[i];
        if (std::abs(a.x() * b.y() - a.y() * b.x()) > 1e-12 * scale * scale) {
          non_collinear_ = true;
          break;
        }
      }
    }
  }
}

OutputMatrix build_output_matrix(const LandmarkSet& landmarks) {
  const auto n = static_cast<Eigen::Index>(landmarks.size());
  OutputMatrix c = OutputMatrix::Zero(2 * n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2& p = landmarks.points()[static_cast<std::size_t>(i)];
    c.block<2, 2>(2 * i, 0) = -Mat2::Identity();
    c.block<2, 2>(2 * i, 2) = p.x() * Mat2::Identity();
    c.block<2, 2>(2 * i, 4) = p.y() * Mat2::Identity();
  }
  return c;
}

VecX measure(const Pose& pose, const LandmarkSet& landmarks) {
  const auto n = static_cast<Eigen::Index>(landmarks.size());
  VecX y(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y.segment<2>(2 * i) = pose.rotation * landmarks.points()[static_cast<std::size_t>(i)] - pose.position;
  }
  return y;
}

ObservabilityReport observability_check(const OutputMatrix& c) {
  const Mat6 ctc = c.transpose() * c;
  Eigen::SelfAdjointEigenSolver<Mat6> eig(ctc);
  const auto& ev = eig.eigenvalues();
  ObservabilityReport r;
  r.min_eigenvalue = ev.minCoeff();
  r.max_eigenvalue = ev.maxCoeff();
  const double tol = 1e-8 * std::max(r.max_eigenvalue, 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) ++r.rank;
  }
  r.ok = r.rank == 6;
  return r;
}

ObservabilityReport observability_check(const LandmarkSet& landmarks) {
  return observability_check(build_output_matrix(landmarks));
}

double GaussianSource::uniform() {
  // 53 random bits -> [0, 1), then map to [-1, 1).
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GaussianSource::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double a = 0.0;
  double b = 0.0;
  double s = 0.0;
  do {
    a = uniform();
    b = uniform();
    s = a * a + b * b;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = b * f;
  has_cached_ = true;
  return a * f;
}

NoisyReadings add_noise(const VecX& y, const VelocityInput& u, GaussianSource& source,
                        double sigma_landmark, double sigma_velocity) {
  if (sigma_landmark < 0.0 || sigma_velocity < 0.0) throw Error("noise sigmas must be non-negative");
  NoisyReadings out{y, u};
  if (sigma_landmark > 0.0) {
    for (Eigen::Index i = 0; i < out.y.size(); ++i) out.y(i) += sigma_landmark * source.next();
  }
  if (sigma_velocity > 0.0) {
    out.u.v.x() += sigma_velocity * source.next();
    out.u.v.y() += sigma_velocity * source.next();
  }
  return out;
}

NoisyReadings add_noise(const VecX& y, const VelocityInput& u, std::uint64_t seed,
                        double sigma_landmark, double sigma_velocity) {
  GaussianSource source(seed);
  return add_noise(y, u, source, sigma_landmark, sigma_velocity);
}

}  // namespace obslab
