#pragma once

namespace obslab {

enum class LambertBranch { principal, minus_one };

/// Real branches of the Lambert W function, W(z) exp(W(z)) = z.
///
/// principal: z >= -1/e, W >= -1.  minus_one: -1/e <= z < 0, W <= -1.
/// Halley iteration from a branch-point series seed near -1/e, a log
/// asymptotic seed elsewhere. Throws obslab::Error outside the domain.
double lambert_w(double z, LambertBranch branch);

}  // namespace obslab
