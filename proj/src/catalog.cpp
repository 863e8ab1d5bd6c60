#include "risingts/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace risingts::catalog {

Instance stationary(const std::vector<double>& means, std::uint64_t horizon) {
  std::vector<Arm> arms;
  arms.reserve(means.size());
  for (double m : means) arms.push_back({RewardCurve::constant(m), RewardLaw::bernoulli()});
  return Instance(std::move(arms), horizon);
}

Instance doubling_pair(std::uint64_t horizon) {
  std::vector<double> first(horizon);
  std::vector<double> second(horizon);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    const int e = static_cast<int>(std::min<std::uint64_t>(n, 2000));
    first[n - 1] = 1.0 - std::ldexp(1.0, -e);
    second[n - 1] = 1.0 - std::ldexp(1.0, 2 - 2 * e);
  }
  return Instance({{RewardCurve::tabulated(std::move(first)), RewardLaw::bernoulli()},
                   {RewardCurve::tabulated(std::move(second)), RewardLaw::bernoulli()}},
                  horizon);
}

Instance shifted_power_pair(std::uint64_t horizon, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("shifted power pair: lambda must lie in [0, 1]");
  std::vector<double> first(horizon);
  std::vector<double> second(horizon);
  const double scale = std::pow(2.0, lambda - 1.0);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    const double drop = scale / std::pow(static_cast<double>(n) + 1.0, lambda);
    first[n - 1] = 1.0 - drop;
    second[n - 1] = 0.5 - drop;
  }
  return Instance({{RewardCurve::tabulated(std::move(first)), RewardLaw::bernoulli()},
                   {RewardCurve::tabulated(std::move(second)), RewardLaw::bernoulli()}},
                  horizon);
}

Instance fifteen_arm(std::uint64_t horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  for (;;) {
    std::vector<Arm> arms;
    for (int i = 0; i < 15; ++i) {
      const double c = 0.3 + 0.7 * unit(rng);
      if (unit(rng) < 0.5) {
        arms.push_back({RewardCurve::exponential(c, log_uniform(1e-4, 1e-2)), RewardLaw::bernoulli()});
      } else {
        const double rho = 0.3 + 0.7 * unit(rng);
        const double reach = log_uniform(10.0, 5000.0);  // b^{1/rho}: pull count where the curve turns
        arms.push_back({RewardCurve::polynomial(c, std::pow(reach, rho), rho), RewardLaw::bernoulli()});
      }
    }
    try {
      return Instance(std::move(arms), horizon);
    } catch (const InstanceError&) {
      // tied optimum; draw again
    }
  }
}

Instance late_riser(std::uint64_t horizon) {
  // Constant 1/2 arm against 0.45 + n / 20000, capped at 0.6.
  const auto steady = RewardCurve::linear_capped(Rational(1), Rational(1, 2), Rational(0));
  const auto riser = RewardCurve::linear_capped(Rational(1, 20000), Rational(3, 5), Rational(-9000));
  return Instance({{steady, RewardLaw::bernoulli()}, {riser, RewardLaw::bernoulli()}}, horizon);
}

}  // namespace risingts::catalog
