#include "generators.hpp"
#include "obslab/landmarks.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace obslab;
using obslab::testing::Gen;

namespace {

LandmarkSet reference_landmarks() { return LandmarkSet({Vec2(1, 3), Vec2(3, 1), Vec2(4, 4)}); }

}  // namespace

TEST(OutputMatrix, ReferenceLandmarks) {
  const OutputMatrix c = build_output_matrix(reference_landmarks());
  ASSERT_EQ(c.rows(), 6);
  const double p[3][2] = {{1, 3}, {3, 1}, {4, 4}};
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix<double, 2, 6> row;
    row << -1, 0, p[i][0], 0, p[i][1], 0,  //
        0, -1, 0, p[i][0], 0, p[i][1];
    EXPECT_EQ((c.block<2, 6>(2 * i, 0)), row);
  }
}

TEST(OutputMatrix, SingleLandmark) {
  const OutputMatrix c = build_output_matrix(LandmarkSet({Vec2(2, -1)}));
  Eigen::Matrix<double, 2, 6> row;
  row << -1, 0, 2, 0, -1, 0, 0, -1, 0, 2, 0, -1;
  EXPECT_EQ(c, row);
}

TEST(OutputMatrix, IdentityPoseReturnsLandmarks) {
  Gen g(21);
  for (int i = 0; i < 50; ++i) {
    const LandmarkSet set = g.landmarks();
    const VecX y = build_output_matrix(set) * embed(Pose{});
    for (std::size_t k = 0; k < set.size(); ++k) {
      EXPECT_NEAR(y(2 * k), set.points()[k](0), 1e-15);
      EXPECT_NEAR(y(2 * k + 1), set.points()[k](1), 1e-15);
    }
  }
}

TEST(Measure, MatchesOutputMatrix) {
  Gen g(22);
  for (int i = 0; i < 1000; ++i) {
    const LandmarkSet set = g.landmarks();
    const Pose p = g.pose();
    const VecX direct = measure(p, set);
    const VecX linear = build_output_matrix(set) * embed(p);
    EXPECT_LT((direct - linear).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Measure, Example) {
  Pose p;
  p.rotation = Rotation2::from_angle(2 * std::atan(1.0));
  p.position = Vec2(1, 1);
  // R p - P with R = rot(90 deg) and landmark (2, 0): (0, 2) - (1, 1).
  const VecX y = measure(p, LandmarkSet({Vec2(2, 0)}));
  EXPECT_NEAR(y(0), -1.0, 1e-15);
  EXPECT_NEAR(y(1), 1.0, 1e-15);
}

TEST(LandmarkSet, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(LandmarkSet({}), Error);
  EXPECT_THROW(LandmarkSet({Vec2(1, std::nan(""))}), Error);
}

TEST(Observability, ReferenceLandmarksFullRank) {
  const auto r = observability_check(reference_landmarks());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.rank, 6);
  EXPECT_TRUE(reference_landmarks().non_collinear());
}

// C^T C = M (x) I2 with M = sum_i c_i c_i^T, c_i = (-1, p_i1, p_i2). For the
// reference set M = [[3,-8,-8],[-8,26,22],[-8,22,26]], whose eigenvalues are
// 4 and (51 -/+ sqrt(2537)) / 2.
TEST(Observability, ReferenceEigenvaluesClosedForm) {
  const auto r = observability_check(reference_landmarks());
  EXPECT_NEAR(r.min_eigenvalue, (51 - std::sqrt(2537.0)) / 2, 1e-11);
  EXPECT_NEAR(r.max_eigenvalue, (51 + std::sqrt(2537.0)) / 2, 1e-11);
}

TEST(Observability, CollinearFails) {
  const LandmarkSet set({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2), Vec2(-3, -3)});
  EXPECT_FALSE(set.non_collinear());
  const auto r = observability_check(set);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.rank, 4);
}

TEST(Observability, TwoLandmarksAreRankDeficient) {
  const auto r = observability_check(LandmarkSet({Vec2(1, 0), Vec2(0, 1)}));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.rank, 4);
}

TEST(Observability, RandomNonCollinearSetsAreObservable) {
  Gen g(23);
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(observability_check(g.landmarks()).ok);
}

TEST(Noise, ZeroSigmaIsIdentity) {
  Gen g(24);
  const VecX y = Eigen::VectorXd::LinSpaced(6, -1, 1);
  const VelocityInput u = g.velocity();
  const auto r = add_noise(y, u, 7, 0.0, 0.0);
  EXPECT_EQ(r.y, y);
  EXPECT_EQ(r.u.v, u.v);
  EXPECT_EQ(r.u.omega, u.omega);
}

TEST(Noise, MomentsAndAngularRateUntouched) {
  GaussianSource src(99);
  const int n = 100000;
  double sum = 0, sq = 0;
  const VecX y = VecX::Zero(6);
  for (int i = 0; i < n / 8; ++i) {
    const auto r = add_noise(y, {0.7, Vec2::Zero()}, src, 0.04, 0.04);
    EXPECT_EQ(r.u.omega, 0.7);
    for (int k = 0; k < 6; ++k) sum += r.y(k), sq += r.y(k) * r.y(k);
    for (int k = 0; k < 2; ++k) sum += r.u.v(k), sq += r.u.v(k) * r.u.v(k);
  }
  const double m = n / 8 * 8;
  EXPECT_NEAR(sum / m, 0.0, 4 * 0.04 / std::sqrt(m));
  EXPECT_NEAR(std::sqrt(sq / m), 0.04, 0.04 * 0.01);
}

TEST(Noise, StandardNormalStatistics) {
  GaussianSource src(5);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = src.next();
    s1 += z, s2 += z * z, s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.06);
}

TEST(Noise, SeedDeterminesStream) {
  GaussianSource a(123), b(123), c(124);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}
