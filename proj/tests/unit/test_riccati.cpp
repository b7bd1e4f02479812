#include "generators.hpp"
#include "obslab/riccati.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace obslab;
using obslab::testing::Gen;

namespace {

const LandmarkSet kLandmarks({Vec2(1, 3), Vec2(3, 1), Vec2(4, 4)});

double max_abs(const MatX& m) { return m.cwiseAbs().maxCoeff(); }

// Sigma with unequal x/y weights, so C^T Sigma C does not commute with the
// rotation blocks.
MatX anisotropic_sigma() {
  VecX d(6);
  d << 0.3, 1.2, 0.8, 0.5, 1.0, 0.2;
  return d.asDiagonal();
}

GainState integrate(GainState g, const VelocityProfile& prof, const Mat6& info, double t_end, double dt) {
  const auto n = std::lround(t_end / dt);
  for (long k = 0; k < n; ++k) {
    const double t = k * dt;
    g = step_riccati(g, prof.at(t), prof.at(t + 0.5 * dt), prof.at(t + dt), info, dt);
  }
  return g;
}

// P(t) = e^{-eps t} Phi(0,t)^T P0 Phi(0,t) + int_0^t e^{-eps (t-s)} Phi(s,t)^T M Phi(s,t) ds
Mat6 variation_of_constants(const Mat6& p0, const Mat6& m, double eps, const SignalProfile& w, double t) {
  const Mat6 phi0 = transition(w.integral(t, 0.0)).expand();
  auto integrand = [&](double s) -> Mat6 {
    const Mat6 phi = transition(w.integral(t, s)).expand();
    return std::exp(-eps * (t - s)) * phi.transpose() * m * phi;
  };
  return std::exp(-eps * t) * phi0.transpose() * p0 * phi0 + obslab::testing::simpson(integrand, 0.0, t, 4000);
}

}  // namespace

TEST(Riccati, MakeGainStateValidates) {
  const GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  EXPECT_EQ(g.p, 0.5 * Mat6::Identity());
  EXPECT_EQ(g.sigma, 0.5 * MatX::Identity(6, 6));
  EXPECT_THROW(make_gain_state(3, 0.0, 0.5, 0.5), Error);
  EXPECT_THROW(make_gain_state(3, 0.6, -1, 0.5), Error);
}

// C^T Sigma C = K (x) I2 commutes with the rotations, so for P0 = p I the
// solution is p e^{-eps t} I + (1 - e^{-eps t}) / eps C^T Sigma C for any w.
TEST(Riccati, ClosedFormIsotropic) {
  const OutputMatrix c = build_output_matrix(kLandmarks);
  const GainState g0 = make_gain_state(3, 0.6, 0.5, 0.5);
  const Mat6 info = information_matrix(c, g0.sigma);
  const VelocityProfile prof{SignalProfile::sine(2.0, 0.02), SignalProfile::constant(1), {}};
  const double t = 7.5;
  const GainState g = integrate(g0, prof, info, t, 1e-3);
  const Mat6 expected = 0.5 * std::exp(-0.6 * t) * Mat6::Identity() + (1 - std::exp(-0.6 * t)) / 0.6 * info;
  EXPECT_LT(max_abs(g.p - expected), 1e-10);
}

TEST(Riccati, ScalarCaseAtUnitTime) {
  // w = 0, Sigma = I, eps = 1, P0 = I: P(1) = e^{-1} I + (1 - e^{-1}) C^T C.
  const OutputMatrix c = build_output_matrix(kLandmarks);
  GainState g{Mat6::Identity(), 1.0, MatX::Identity(6, 6)};
  for (int k = 0; k < 1000; ++k) g = step_riccati(g, VelocityInput{}, c, 1e-3);
  const Mat6 expected = std::exp(-1.0) * Mat6::Identity() + (1 - std::exp(-1.0)) * (c.transpose() * c);
  EXPECT_LT(max_abs(g.p - expected), 1e-11);
}

TEST(Riccati, GeneralSolutionOracle) {
  Gen gen(31);
  const OutputMatrix c = build_output_matrix(kLandmarks);
  const Mat6 info = information_matrix(c, anisotropic_sigma());
  for (int i = 0; i < 5; ++i) {
    const VelocityProfile prof{gen.profile(1.5, 0.3), {}, {}};
    Mat6 p0 = gen.symmetric(1.0);
    p0 += (1.0 - min_eigenvalue(p0)) * Mat6::Identity();
    const double eps = gen.uniform(0.2, 2.0);
    const double t = gen.uniform(1.0, 4.0);
    const double dt = t / 2000;
    const GainState g = integrate({p0, eps, anisotropic_sigma()}, prof, info, t, dt);
    EXPECT_LT(max_abs(g.p - variation_of_constants(p0, info, eps, prof.omega, t)), 1e-9) << "case " << i;
  }
}

// Constant w: the stationary point solves (eps I + I (x) A^T + A^T (x) I) vec P = vec M.
TEST(Riccati, StationaryPointForConstantTurn) {
  const OutputMatrix c = build_output_matrix(kLandmarks);
  const Mat6 info = information_matrix(c, anisotropic_sigma());
  const double eps = 0.8, w = 0.7;
  const Mat6 a = system_matrices({w, Vec2::Zero()}).a;
  const Eigen::Matrix<double, 36, 36> op = eps * Eigen::Matrix<double, 36, 36>::Identity() +
                                           Eigen::kroneckerProduct(Mat6::Identity(), a.transpose()).eval() +
                                           Eigen::kroneckerProduct(a.transpose(), Mat6::Identity()).eval();
  const Eigen::Matrix<double, 36, 1> vec_m = Eigen::Map<const Eigen::Matrix<double, 36, 1>>(info.data());
  const Eigen::Matrix<double, 36, 1> vec_p = op.fullPivLu().solve(vec_m);
  const Mat6 p_star = Eigen::Map<const Mat6>(vec_p.data());

  EXPECT_LT(max_abs(riccati_rhs(p_star, w, eps, info)), 1e-12);
  GainState g{p_star, eps, anisotropic_sigma()};
  for (int k = 0; k < 100; ++k) g = step_riccati(g, {w, Vec2::Zero()}, {w, Vec2::Zero()}, {w, Vec2::Zero()}, info, 1e-2);
  EXPECT_LT(max_abs(g.p - p_star), 1e-12);

  GainState far{Mat6::Identity() * 5, eps, anisotropic_sigma()};
  for (int k = 0; k < 5000; ++k) far = step_riccati(far, {w, Vec2::Zero()}, {w, Vec2::Zero()}, {w, Vec2::Zero()}, info, 1e-2);
  EXPECT_LT(max_abs(far.p - p_star), 1e-10);
}

TEST(Riccati, RightHandSidePreservesSymmetry) {
  Gen gen(32);
  const Mat6 info = information_matrix(build_output_matrix(kLandmarks), anisotropic_sigma());
  for (int i = 0; i < 500; ++i) {
    const Mat6 p = gen.symmetric();
    const Mat6 d = riccati_rhs(p, gen.uniform(-5, 5), gen.uniform(0.01, 10), info);
    EXPECT_LT(max_abs(d - d.transpose()), 1e-12);
  }
}

TEST(Riccati, StepIsExactlySymmetric) {
  Gen gen(33);
  const OutputMatrix c = build_output_matrix(kLandmarks);
  GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  const Mat6 info = information_matrix(c, g.sigma);
  for (int k = 0; k < 2000; ++k) {
    g = step_riccati(g, gen.velocity(), gen.velocity(), gen.velocity(), info, 1e-2);
    ASSERT_EQ(g.p, g.p.transpose());
  }
}

TEST(Riccati, NonFiniteThrows) {
  const OutputMatrix c = build_output_matrix(kLandmarks);
  GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  g.p(0, 0) = std::nan("");
  EXPECT_THROW(step_riccati(g, VelocityInput{}, c, 1e-3), Error);
}

TEST(InvertGain, CholeskyAndFallback) {
  Gen gen(34);
  Mat6 p = gen.symmetric(1.0);
  p += (2.0 - min_eigenvalue(p)) * Mat6::Identity();
  const auto inv = invert_gain(p);
  EXPECT_FALSE(inv.used_pseudo_inverse);
  EXPECT_LT(max_abs(inv.inverse * p - Mat6::Identity()), 1e-12);

  Mat6 singular = Mat6::Identity();
  singular(5, 5) = 0.0;
  const auto pinv = invert_gain(singular);
  EXPECT_TRUE(pinv.used_pseudo_inverse);
  EXPECT_NEAR(pinv.inverse(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(pinv.inverse(5, 5), 0.0, 1e-12);
}

TEST(Gramian, MatchesQuadratureOracle) {
  Gen gen(35);
  const OutputMatrix c = build_output_matrix(kLandmarks);
  const MatX sigma = anisotropic_sigma();
  const Mat6 info = information_matrix(c, sigma);
  for (int i = 0; i < 10; ++i) {
    const VelocityProfile prof{gen.profile(2.0, 0.3), {}, {}};
    const double t = gen.uniform(0, 20), window = gen.uniform(0.5, 3);
    auto integrand = [&](double tau) -> Mat6 {
      const Mat6 phi = transition(prof.omega.integral(t, tau)).expand();
      return phi.transpose() * info * phi;
    };
    const Mat6 oracle = obslab::testing::simpson(integrand, t, t + window, 4000);
    const double e1 = max_abs(observability_gramian(c, sigma, prof, t, window, 1e-3) - oracle);
    const double e2 = max_abs(observability_gramian(c, sigma, prof, t, window, 5e-4) - oracle);
    EXPECT_LT(e1, 1e-4);
    EXPECT_NEAR(e1 / e2, 4.0, 0.3);
  }
}

// With Sigma = 0.5 I the Gramian over any window T is T C^T Sigma C, so the
// condition >= alpha I with alpha = T lambda_min(Sigma) lambda_min(C^T C)
// already holds at the first grid point.
TEST(Excitation, ReferenceLandmarks) {
  const OutputMatrix c = build_output_matrix(kLandmarks);
  const GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  const VelocityProfile prof{SignalProfile::sine(2.0, 0.02), SignalProfile::constant(1), {}};
  const double dt = 1e-2;
  const auto e = excitation_constants(c, g.sigma, 0.6, prof, 20.0, dt, g.p);
  const double lmin_ctc = (51 - std::sqrt(2537.0)) / 2;
  EXPECT_NEAR(e.t_window, dt, 1e-15);
  EXPECT_NEAR(e.alpha, e.t_window * 0.5 * lmin_ctc, 1e-14);
  EXPECT_NEAR(e.beta1, 2 * e.t_window * std::exp(-0.6 * e.t_window) * 0.5 * lmin_ctc, 1e-12);
  // lambda_max(P) decreases from 0.5 toward lambda_max(C^T Sigma C)/eps only if that is below 0.5.
  const double lmax_info = 0.5 * (51 + std::sqrt(2537.0)) / 2;
  EXPECT_NEAR(e.beta2, 0.5 * std::exp(-0.6 * 20) + (1 - std::exp(-0.6 * 20)) / 0.6 * lmax_info, 1e-8);
}

TEST(Excitation, UnobservableThrows) {
  const OutputMatrix c = build_output_matrix(LandmarkSet({Vec2(0, 0), Vec2(1, 1)}));
  const VelocityProfile prof{SignalProfile::constant(0.5), {}, {}};
  EXPECT_THROW(excitation_constants(c, MatX::Identity(4, 4), 0.6, prof, 10, 1e-2, Mat6::Identity()), Error);
}

TEST(Excitation, LowerBoundHoldsAlongTrajectory) {
  const OutputMatrix c = build_output_matrix(kLandmarks);
  GainState g = make_gain_state(3, 0.6, 0.5, 0.5);
  const Mat6 info = information_matrix(c, g.sigma);
  const VelocityProfile prof{SignalProfile::sine(2.0, 0.02), SignalProfile::constant(1), {}};
  const auto e = excitation_constants(c, g.sigma, 0.6, prof, 20.0, 1e-2, g.p);
  const double dt = 1e-3;
  for (int k = 0; k < 30000; ++k) {
    const double t = k * dt;
    g = step_riccati(g, prof.at(t), prof.at(t + dt / 2), prof.at(t + dt), info, dt);
    if (t + dt > e.t_window) ASSERT_GE(min_eigenvalue(g.p), e.beta1);
  }
}
