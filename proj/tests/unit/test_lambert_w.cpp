#include "generators.hpp"
#include "obslab/lambert_w.hpp"
#include "obslab/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace obslab;
using obslab::testing::Gen;

namespace {

const double kMinusInvE = -1.0 / std::numbers::e;

// Root of w e^w = z on [lo, hi] where w e^w is monotone.
double bisect(double z, double lo, double hi) {
  const bool increasing = (hi * std::exp(hi)) > (lo * std::exp(lo));
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool below = mid * std::exp(mid) < z;
    ((below == increasing) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(LambertW, Examples) {
  EXPECT_EQ(lambert_w(0.0, LambertBranch::principal), 0.0);
  EXPECT_NEAR(lambert_w(std::numbers::e, LambertBranch::principal), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w(kMinusInvE, LambertBranch::principal), -1.0, 1e-8);
  EXPECT_NEAR(lambert_w(kMinusInvE, LambertBranch::minus_one), -1.0, 1e-8);
}

TEST(LambertW, MinusOneBranchAgainstBisection) {
  const double w = lambert_w(-0.1, LambertBranch::minus_one);
  EXPECT_NEAR(w * std::exp(w) + 0.1, 0.0, 1e-15);
  EXPECT_NEAR(w, bisect(-0.1, -50.0, -1.0), 1e-12);
  EXPECT_NEAR(w, -3.577152063957297, 1e-12);
}

TEST(LambertW, BranchesAgainstBisection) {
  Gen g(71);
  for (int i = 0; i < 300; ++i) {
    const double z = g.uniform(kMinusInvE, 0.0);
    if (z == 0.0) continue;
    EXPECT_NEAR(lambert_w(z, LambertBranch::principal), bisect(z, -1.0, 0.0), 1e-10);
    EXPECT_NEAR(lambert_w(z, LambertBranch::minus_one), bisect(z, -800.0, -1.0), 1e-10);
    const double zp = std::exp(g.uniform(-20, 20));
    EXPECT_NEAR(lambert_w(zp, LambertBranch::principal), bisect(zp, 0.0, 50.0), 1e-10 * std::max(1.0, std::log(zp)));
  }
}

TEST(LambertW, ResidualProperty) {
  Gen g(72);
  for (int i = 0; i < 10000; ++i) {
    const double z0 = g.uniform(kMinusInvE, 50.0);
    const double w0 = lambert_w(z0, LambertBranch::principal);
    EXPECT_LT(std::abs(w0 * std::exp(w0) - z0), 1e-12 * std::max(1.0, std::abs(z0)));
    EXPECT_GE(w0, -1.0);
    double z1 = g.uniform(kMinusInvE, 0.0);
    if (z1 == 0.0) z1 = -1e-300;
    const double w1 = lambert_w(z1, LambertBranch::minus_one);
    EXPECT_LT(std::abs(w1 * std::exp(w1) - z1), 1e-12);
    EXPECT_LE(w1, -1.0);
  }
}

TEST(LambertW, DomainErrors) {
  EXPECT_THROW(lambert_w(-0.4, LambertBranch::principal), Error);
  EXPECT_THROW(lambert_w(-0.4, LambertBranch::minus_one), Error);
  EXPECT_THROW(lambert_w(0.0, LambertBranch::minus_one), Error);
  EXPECT_THROW(lambert_w(1.0, LambertBranch::minus_one), Error);
  EXPECT_THROW(lambert_w(std::nan(""), LambertBranch::principal), Error);
}
