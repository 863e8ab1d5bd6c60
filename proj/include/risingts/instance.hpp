#pragma once

#include "risingts/reward_curve.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace risingts {

/// Raised when a set of arms does not form a valid rising rested bandit
/// (decreasing curve, mean outside the law's support, tied optimum).
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LawKind { Bernoulli, BoundedUniform };

/// How the subgaussian parameter of a bounded-uniform law is reported:
/// the exact uniform proxy w^2/3 or the Hoeffding proxy (2w)^2/4.
enum class SubgaussianProxy { Tight, Hoeffding };

/// Reward distribution around the current mean mu_i(n).
class RewardLaw {
 public:
  static RewardLaw bernoulli() { return RewardLaw(LawKind::Bernoulli, 0.0, SubgaussianProxy::Tight); }
  static RewardLaw bounded_uniform(double half_width, SubgaussianProxy proxy = SubgaussianProxy::Tight);

  LawKind kind() const { return kind_; }
  double half_width() const { return half_width_; }
  SubgaussianProxy proxy() const { return proxy_; }
  bool binary() const { return kind_ == LawKind::Bernoulli; }

  /// lambda^2 such that centred rewards are lambda^2-subgaussian.
  double subgaussian() const;

  /// True when a reward with this mean stays inside [0, 1].
  bool admits(double mean) const;

  template <class Rng>
  double sample(double mean, Rng& rng) const {
    const double u = std::generate_canonical<double, 53>(rng);
    if (kind_ == LawKind::Bernoulli) return u < mean ? 1.0 : 0.0;
    return mean - half_width_ + 2.0 * half_width_ * u;
  }

  friend bool operator==(const RewardLaw&, const RewardLaw&) = default;

 private:
  RewardLaw(LawKind kind, double half_width, SubgaussianProxy proxy)
      : kind_(kind), half_width_(half_width), proxy_(proxy) {}

  LawKind kind_;
  double half_width_;
  SubgaussianProxy proxy_;
};

struct Arm {
  RewardCurve curve;
  RewardLaw law;
  friend bool operator==(const Arm&, const Arm&) = default;
};

/// A rising rested bandit over a fixed horizon.
///
/// Curve values and their prefix sums are tabulated for n in [1, T] at
/// construction, so averages are O(1). The instance is immutable afterwards
/// and may be shared across threads.
class Instance {
 public:
  Instance(std::vector<Arm> arms, std::uint64_t horizon);

  std::size_t arms_count() const { return arms_.size(); }
  std::uint64_t horizon() const { return horizon_; }
  const Arm& arm(std::size_t i) const { return arms_.at(i); }
  const std::vector<Arm>& arms() const { return arms_; }

  /// i*(T): the unique arm with the largest average expected reward at the horizon.
  std::size_t optimal_arm() const { return optimal_; }

  /// mu_i(n). Tabulated for n <= T, evaluated from the curve beyond.
  double mu(std::size_t i, std::uint64_t n) const;

  /// sum_{l=1}^{t} mu_i(l), for 0 <= t <= T.
  double prefix_sum(std::size_t i, std::uint64_t t) const;

  /// Average expected reward over the first t pulls, 1 <= t <= T.
  double avg_mu(std::size_t i, std::uint64_t t) const;

  /// Average of mu_i over pulls t - tau + 1 .. t. Requires 1 <= tau <= t <= T.
  double windowed_avg_mu(std::size_t i, std::uint64_t t, std::uint64_t tau) const;

  /// The same arms validated against a different horizon.
  Instance with_horizon(std::uint64_t horizon) const { return Instance(arms_, horizon); }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.horizon_ == b.horizon_ && a.arms_ == b.arms_;
  }

 private:
  void check_arm(std::size_t i) const;

  std::vector<Arm> arms_;
  std::uint64_t horizon_;
  std::size_t optimal_ = 0;
  std::vector<std::vector<double>> values_;  // values_[i][n - 1]
  std::vector<std::vector<double>> prefix_;  // prefix_[i][t], prefix_[i][0] = 0
};

double avg_mu(const Instance& instance, std::size_t i, std::uint64_t t);
double windowed_avg_mu(const Instance& instance, std::size_t i, std::uint64_t t, std::uint64_t tau);

}  // namespace risingts
