#include "risingts/lower_bound.hpp"

#include "risingts/int128.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace risingts {

namespace {

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const Int128 l = static_cast<Int128>(a / std::gcd(a, b)) * b;
  if (l > (Int128{1} << 40)) throw std::overflow_error("exact table: common denominator too large");
  return static_cast<std::int64_t>(l);
}

}  // namespace

LowerBoundConstruction lower_bound_instances(std::size_t arms, std::uint64_t sigma_bar, std::uint64_t horizon,
                                             std::optional<std::size_t> boosted_arm) {
  if (arms < 2) throw std::invalid_argument("lower bound: needs at least two arms");
  if (sigma_bar < 2 || 2 * sigma_bar + 1 > horizon) {
    throw std::invalid_argument("lower bound: sigma_bar must lie in [2, (T - 1) / 2]");
  }
  const std::size_t boosted = boosted_arm.value_or(arms - 1);
  if (boosted == 0 || boosted >= arms) throw std::invalid_argument("lower bound: boosted arm must be in [1, K - 1]");

  const Rational s(static_cast<std::int64_t>(sigma_bar) - 2, 2);
  const Rational slope = s.numerator() == 0 ? Rational(1) : Rational(1) / (2 * s);
  const Rational offset(1);

  std::vector<Arm> base;
  base.reserve(arms);
  base.push_back({RewardCurve::linear_capped(slope, Rational(1, 2), offset), RewardLaw::bernoulli()});
  for (std::size_t i = 1; i < arms; ++i) {
    base.push_back({RewardCurve::linear_capped(slope, Rational(1, 4), offset), RewardLaw::bernoulli()});
  }
  std::vector<Arm> boosted_arms = base;
  boosted_arms[boosted].curve = RewardCurve::linear_capped(slope, Rational(1), offset);

  return {Instance(std::move(base), horizon), Instance(std::move(boosted_arms), horizon),
          static_cast<double>(arms) * static_cast<double>(sigma_bar - 2) / 64.0, s, boosted};
}

ExactPrefixTable::ExactPrefixTable(const Instance& instance) : horizon_(instance.horizon()) {
  for (const auto& arm : instance.arms()) {
    if (!arm.curve.has_exact_form()) throw std::invalid_argument("exact table: every arm must be linear-capped");
  }
  // Every value slope (n - offset) or cap has a denominator dividing
  // lcm(slope.den * offset.den, cap.den).
  for (const auto& arm : instance.arms()) {
    const auto& f = std::get<RewardCurve::LinearCapped>(arm.curve.family());
    const Int128 value_den = static_cast<Int128>(f.slope.denominator()) * f.offset.denominator();
    if (value_den > (Int128{1} << 40)) throw std::overflow_error("exact table: common denominator too large");
    denominator_ = checked_lcm(denominator_, static_cast<std::int64_t>(value_den));
    denominator_ = checked_lcm(denominator_, f.cap.denominator());
  }

  prefix_.resize(instance.arms_count());
  for (std::size_t i = 0; i < instance.arms_count(); ++i) {
    auto& prefix = prefix_[i];
    prefix.assign(horizon_ + 1, 0);
    Int128 sum = 0;
    for (std::uint64_t n = 1; n <= horizon_; ++n) {
      const Rational v = instance.arm(i).curve.exact(n);
      sum += static_cast<Int128>(v.numerator()) * (denominator_ / v.denominator());
      if (sum > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("exact table: prefix overflow");
      prefix[n] = static_cast<std::int64_t>(sum);
    }
  }
}

Rational ExactPrefixTable::avg(std::size_t i, std::uint64_t t) const {
  if (t == 0 || t > horizon_) throw std::invalid_argument("exact table: t must lie in [1, T]");
  return Rational(prefix_.at(i)[t]) / Rational(denominator_) / Rational(static_cast<std::int64_t>(t));
}

std::size_t ExactPrefixTable::optimal_arm() const {
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t i = 1; i < prefix_.size(); ++i) {
    if (prefix_[i][horizon_] > prefix_[best][horizon_]) {
      best = i;
      tied = false;
    } else if (prefix_[i][horizon_] == prefix_[best][horizon_]) {
      tied = true;
    }
  }
  if (tied) throw InstanceError("exact table: optimal arm at the horizon is not unique");
  return best;
}

std::uint64_t ExactPrefixTable::sigma_mu() const {
  const std::size_t best = optimal_arm();
  const auto horizon = static_cast<Int128>(horizon_);
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (i == best) continue;
    // P*(l) / l > P_i(T) / T  <=>  P*(l) T > P_i(T) l
    const Int128 target = prefix_[i][horizon_];
    std::uint64_t l = 1;
    while (static_cast<Int128>(prefix_[best][l]) * horizon <= target * static_cast<Int128>(l)) ++l;
    worst = std::max(worst, l);
  }
  return worst;
}

LowerBoundCheck check_lower_bound(const LowerBoundConstruction& construction, std::uint64_t sigma_bar) {
  const std::uint64_t horizon = construction.mu.horizon();
  const ExactPrefixTable mu(construction.mu);
  const ExactPrefixTable mu_prime(construction.mu_prime);

  const std::size_t best = mu.optimal_arm();
  std::optional<Rational> min_gap;
  for (std::size_t i = 0; i < construction.mu.arms_count(); ++i) {
    if (i == best) continue;
    const Rational gap = std::max(Rational(0), mu.avg(best, horizon) - mu.avg(i, horizon));
    if (!min_gap || gap < *min_gap) min_gap = gap;
  }
  const std::size_t best_prime = mu_prime.optimal_arm();
  const Rational gap_prime = std::max(Rational(0), mu_prime.avg(best_prime, horizon) - mu_prime.avg(0, horizon));

  LowerBoundCheck check{*min_gap, gap_prime, mu.sigma_mu(), mu_prime.sigma_mu(), false, false, false, false};
  check.gap_ok = check.min_gap_mu >= Rational(5, 32);
  check.gap_prime_ok = best_prime == construction.boosted_arm && check.gap_mu_prime >= Rational(1, 8);
  const std::uint64_t worst = std::max(check.sigma_mu, check.sigma_mu_prime);
  check.member = worst <= sigma_bar;
  check.member_relaxed = worst <= 2 * sigma_bar + 2;
  return check;
}

}  // namespace risingts
