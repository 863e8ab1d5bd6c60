#include "risingts/instance.hpp"

#include <cmath>
#include <sstream>

namespace risingts {

RewardLaw RewardLaw::bounded_uniform(double half_width, SubgaussianProxy proxy) {
  if (!(half_width > 0.0 && half_width <= 0.5)) {
    throw std::invalid_argument("bounded-uniform law: half width must lie in (0, 0.5]");
  }
  return RewardLaw(LawKind::BoundedUniform, half_width, proxy);
}

double RewardLaw::subgaussian() const {
  if (kind_ == LawKind::Bernoulli) return 0.25;
  if (proxy_ == SubgaussianProxy::Hoeffding) return half_width_ * half_width_;
  return half_width_ * half_width_ / 3.0;
}

bool RewardLaw::admits(double mean) const {
  if (kind_ == LawKind::Bernoulli) return mean >= 0.0 && mean <= 1.0;
  return mean - half_width_ >= 0.0 && mean + half_width_ <= 1.0;
}

Instance::Instance(std::vector<Arm> arms, std::uint64_t horizon) : arms_(std::move(arms)), horizon_(horizon) {
  if (arms_.empty()) throw InstanceError("instance needs at least one arm");
  if (horizon_ == 0) throw InstanceError("instance horizon must be positive");

  values_.resize(arms_.size());
  prefix_.resize(arms_.size());
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    auto& values = values_[i];
    auto& prefix = prefix_[i];
    values.resize(horizon_);
    prefix.resize(horizon_ + 1);
    prefix[0] = 0.0;
    // Neumaier-compensated running sum.
    double sum = 0.0;
    double carry = 0.0;
    for (std::uint64_t n = 1; n <= horizon_; ++n) {
      const double v = arms_[i].curve(n);
      if (!arms_[i].law.admits(v)) {
        std::ostringstream msg;
        msg << "arm " << i << ": mean " << v << " at pull " << n << " is outside the reward law's range";
        throw InstanceError(msg.str());
      }
      if (n > 1 && v < values[n - 2]) {
        std::ostringstream msg;
        msg << "arm " << i << ": expected reward decreases at pull " << n;
        throw InstanceError(msg.str());
      }
      values[n - 1] = v;
      const double t = sum + v;
      carry += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
      prefix[n] = sum + carry;
    }
  }

  optimal_ = 0;
  bool tied = false;
  for (std::size_t i = 1; i < arms_.size(); ++i) {
    const double candidate = prefix_[i][horizon_];
    const double best = prefix_[optimal_][horizon_];
    if (candidate > best) {
      optimal_ = i;
      tied = false;
    } else if (candidate == best) {
      tied = true;
    }
  }
  if (tied) throw InstanceError("optimal arm at the horizon is not unique");
}

void Instance::check_arm(std::size_t i) const {
  if (i >= arms_.size()) throw std::out_of_range("arm index out of range");
}

double Instance::mu(std::size_t i, std::uint64_t n) const {
  check_arm(i);
  if (n == 0) throw std::invalid_argument("pull index starts at 1");
  if (n <= horizon_) return values_[i][n - 1];
  return arms_[i].curve(n);
}

double Instance::prefix_sum(std::size_t i, std::uint64_t t) const {
  check_arm(i);
  if (t > horizon_) throw std::out_of_range("prefix sum past the horizon");
  return prefix_[i][t];
}

double Instance::avg_mu(std::size_t i, std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("avg_mu: t must be >= 1");
  const double total = prefix_sum(i, t);
  // A flat stretch averages to its value exactly; the division may not.
  if (values_[i][0] == values_[i][t - 1]) return values_[i][0];
  return total / static_cast<double>(t);
}

double Instance::windowed_avg_mu(std::size_t i, std::uint64_t t, std::uint64_t tau) const {
  if (tau == 0) throw std::invalid_argument("windowed_avg_mu: window must be >= 1");
  if (t < tau) throw std::invalid_argument("windowed_avg_mu: window longer than the pull count");
  const double total = prefix_sum(i, t) - prefix_sum(i, t - tau);
  if (values_[i][t - tau] == values_[i][t - 1]) return values_[i][t - 1];
  return total / static_cast<double>(tau);
}

double avg_mu(const Instance& instance, std::size_t i, std::uint64_t t) { return instance.avg_mu(i, t); }

double windowed_avg_mu(const Instance& instance, std::size_t i, std::uint64_t t, std::uint64_t tau) {
  return instance.windowed_avg_mu(i, t, tau);
}

}  // namespace risingts
