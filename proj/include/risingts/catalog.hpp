#pragma once

#include "risingts/instance.hpp"

#include <cstdint>
#include <vector>

namespace risingts::catalog {

/// Bernoulli arms with constant means.
Instance stationary(const std::vector<double>& means, std::uint64_t horizon);

/// mu_1(n) = 1 - 2^-n, mu_2(n) = 1 - 2^(2 - 2n). Averages of the two arms
/// converge at rate 1/T, so no sigma keeps the averaged gap away from zero.
Instance doubling_pair(std::uint64_t horizon);

/// mu_1(n) = 1 - 2^(l-1) / (n+1)^l and mu_2(n) = 1/2 - 2^(l-1) / (n+1)^l,
/// l in [0, 1]. The first arm's average passes 1/2 after two pulls.
Instance shifted_power_pair(std::uint64_t horizon, double lambda);

/// K = 15 Bernoulli arms drawn from the exponential and polynomial families
/// with seeded random parameters. Redraws until the optimum is unique.
Instance fifteen_arm(std::uint64_t horizon, std::uint64_t seed);

/// Two arms where the late riser overtakes a constant arm only after many
/// pulls, so forced exploration pays off. sigma_mu(T) is about 2000 at
/// T = 20000.
Instance late_riser(std::uint64_t horizon);

}  // namespace risingts::catalog
