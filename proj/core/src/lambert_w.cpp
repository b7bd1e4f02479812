#include "obslab/lambert_w.hpp"

#include "obslab/types.hpp"

#include <cmath>
#include <numbers>

namespace obslab {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e
// -1/e rounds to a double slightly off the true branch point; accept inputs
// within a few ulps of it and treat them as the branch point itself.
constexpr double kBranchSlack = 4e-17;

double branch_point_seed(double z, double sign) {
  const double p = sign * std::sqrt(std::max(0.0, 2.0 * (1.0 + std::numbers::e * z)));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

double halley(double z, double w) {
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace

double lambert_w(double z, LambertBranch branch) {
  if (std::isnan(z)) throw Error("lambert_w: NaN argument");
  if (z < -kInvE - kBranchSlack) throw Error("lambert_w: argument below -1/e has no real value");
  if (z <= -kInvE + kBranchSlack) return -1.0;

  if (branch == LambertBranch::principal) {
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return z;
    double w;
    if (z < -0.25) {
      w = branch_point_seed(z, 1.0);
    } else if (z < 3.0) {
      w = std::log1p(z) * (1.0 - std::log1p(std::log1p(z)) / (2.0 + std::log1p(z)));
    } else {
      const double l1 = std::log(z);
      const double l2 = std::log(l1);
      w = l1 - l2 + l2 / l1;
    }
    return halley(z, w);
  }

  if (z >= 0.0) throw Error("lambert_w: branch -1 requires -1/e <= z < 0");
  double w;
  if (z < -0.25) {
    w = branch_point_seed(z, -1.0);
  } else {
    const double l1 = std::log(-z);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(z, w);
}

}  // namespace obslab
