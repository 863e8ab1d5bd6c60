#include "risingts/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace risingts {

std::string_view policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::BetaSWTS:
      return "beta_swts";
    case PolicyKind::GammaSWGTS:
      return "gamma_swgts";
    case PolicyKind::UCB1:
      return "ucb1";
    case PolicyKind::SWUCB:
      return "sw_ucb";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::BetaSWTS, PolicyKind::GammaSWGTS, PolicyKind::UCB1, PolicyKind::SWUCB}) {
    if (policy_kind_name(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown policy kind '" + std::string(name) + "'");
}

std::uint64_t default_swucb_window(std::uint64_t horizon) {
  const auto t = static_cast<double>(horizon);
  const double tau = std::ceil(4.0 * std::sqrt(t * std::log(t)));
  return std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(tau, 1.0)), 1, horizon);
}

double default_precision(const Instance& instance) {
  double lambda2 = 0.0;
  for (const auto& arm : instance.arms()) lambda2 = std::max(lambda2, arm.law.subgaussian());
  return std::min(1.0 / (4.0 * lambda2), 1.0);
}

Int128 quantize_reward(double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("reward must lie in [0, 1]");
  return static_cast<Int128>(std::ldexp(static_cast<long double>(reward), 64));
}

double dequantize(Int128 fixed) { return static_cast<double>(std::ldexp(static_cast<long double>(fixed), -64)); }

SlidingWindow::SlidingWindow(std::size_t arms, std::uint64_t tau)
    : tau_(tau), entries_(arms), sums_(arms, 0), lifetime_(arms, 0) {
  if (tau_ == 0) throw std::invalid_argument("window length must be >= 1");
}

void SlidingWindow::record(std::size_t arm, double reward, std::uint64_t t) {
  const Int128 fixed = quantize_reward(reward);
  entries_.at(arm).push_back({t, fixed});
  sums_[arm] += fixed;
  ++lifetime_[arm];
  if (t + 1 > tau_) evict_before(t + 1 - tau_);
}

void SlidingWindow::evict_before(std::uint64_t stamp) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& q = entries_[i];
    while (!q.empty() && q.front().stamp < stamp) {
      sums_[i] -= q.front().reward;
      q.pop_front();
    }
  }
}

BanditPolicy::BanditPolicy(const PolicyConfig& config, std::size_t arms, std::uint64_t horizon, std::uint64_t tau,
                           std::uint64_t seed)
    : rng_(seed), window_(arms, tau), config_(config), horizon_(horizon) {}

std::size_t BanditPolicy::select_arm(std::uint64_t t) {
  if (t == 0 || t > horizon_) throw std::out_of_range("round outside [1, T]");
  if (t <= last_update_) throw std::invalid_argument("round already played");
  if (t > window_.tau()) window_.evict_before(t - window_.tau());
  const std::uint64_t k = arms();
  if (t <= k * config_.forced_exploration) return static_cast<std::size_t>((t - 1) % k);
  return choose(t);
}

void BanditPolicy::update(std::size_t arm, double reward, std::uint64_t t) {
  if (arm >= arms()) throw std::out_of_range("arm index out of range");
  if (t == 0 || t > horizon_) throw std::out_of_range("round outside [1, T]");
  if (t <= last_update_) throw std::invalid_argument("update rounds must strictly increase");
  check_reward(reward);
  window_.record(arm, reward, t);
  last_update_ = t;
}

void BanditPolicy::check_reward(double reward) const {
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("reward must lie in [0, 1]");
}

std::size_t BanditPolicy::argmax_random_ties(const std::vector<double>& scores) {
  const double best = *std::max_element(scores.begin(), scores.end());
  ties_.clear();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == best) ties_.push_back(i);
  }
  if (ties_.size() == 1) return ties_.front();
  std::uniform_int_distribution<std::size_t> pick(0, ties_.size() - 1);
  return ties_[pick(rng_)];
}

namespace {

class BetaThompson final : public BanditPolicy {
 public:
  using BanditPolicy::BanditPolicy;

 protected:
  std::size_t choose(std::uint64_t) override {
    for (std::size_t i = 0; i < arms(); ++i) {
      const double n = static_cast<double>(window_.count(i));
      const double s = window_.sum(i);
      scores_[i] = sample_beta(s + 1.0, n - s + 1.0);
    }
    return argmax_random_ties(scores_);
  }

  void check_reward(double reward) const override {
    if (reward != 0.0 && reward != 1.0) throw std::invalid_argument("Beta posterior needs rewards in {0, 1}");
  }

 private:
  double sample_beta(double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng_);
    const double y = gb(rng_);
    return x / (x + y);
  }

  std::vector<double> scores_ = std::vector<double>(window_.arms());
};

class GaussThompson final : public BanditPolicy {
 public:
  GaussThompson(const PolicyConfig& config, std::size_t arms, std::uint64_t horizon, std::uint64_t tau,
                std::uint64_t seed, double precision)
      : BanditPolicy(config, arms, horizon, tau, seed), precision_(precision) {}

 protected:
  std::size_t choose(std::uint64_t) override {
    for (std::size_t i = 0; i < arms(); ++i) {
      if (window_.count(i) == 0) return i;
    }
    for (std::size_t i = 0; i < arms(); ++i) {
      const double n = static_cast<double>(window_.count(i));
      scores_[i] = window_.sum(i) / n + normal_(rng_) / std::sqrt(precision_ * n);
    }
    return argmax_random_ties(scores_);
  }

 private:
  double precision_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> scores_ = std::vector<double>(window_.arms());
};

// UCB1 (tau = T, lifetime statistics) and sliding-window UCB share one index shape.
class UpperConfidence final : public BanditPolicy {
 public:
  using BanditPolicy::BanditPolicy;

 protected:
  std::size_t choose(std::uint64_t t) override {
    for (std::size_t i = 0; i < arms(); ++i) {
      if (window_.count(i) == 0) return i;
    }
    const bool sliding = config().kind == PolicyKind::SWUCB;
    const double log_term = sliding ? config().swucb_xi * std::log(static_cast<double>(std::min(t, window_.tau())))
                                    : config().ucb_alpha * std::log(static_cast<double>(t));
    for (std::size_t i = 0; i < arms(); ++i) {
      const double n = static_cast<double>(window_.count(i));
      scores_[i] = window_.sum(i) / n + std::sqrt(log_term / n);
    }
    return argmax_random_ties(scores_);
  }

 private:
  std::vector<double> scores_ = std::vector<double>(window_.arms());
};

}  // namespace

std::unique_ptr<BanditPolicy> make_policy(const PolicyConfig& config, const Instance& instance, std::uint64_t seed) {
  const std::uint64_t horizon = instance.horizon();
  const std::size_t k = instance.arms_count();
  std::uint64_t tau = horizon;
  if (config.window) {
    tau = *config.window;
  } else if (config.kind == PolicyKind::SWUCB) {
    tau = default_swucb_window(horizon);
  }
  if (tau == 0 || tau > horizon) throw std::invalid_argument("window must lie in [1, T]");

  switch (config.kind) {
    case PolicyKind::BetaSWTS:
      for (const auto& arm : instance.arms()) {
        if (!arm.law.binary()) throw std::invalid_argument("Beta Thompson sampling needs Bernoulli rewards");
      }
      return std::make_unique<BetaThompson>(config, k, horizon, tau, seed);
    case PolicyKind::GammaSWGTS: {
      const double precision = config.precision.value_or(default_precision(instance));
      if (!(precision > 0.0) || !std::isfinite(precision)) throw std::invalid_argument("gamma must be positive");
      return std::make_unique<GaussThompson>(config, k, horizon, tau, seed, precision);
    }
    case PolicyKind::UCB1:
      if (!(config.ucb_alpha >= 0.0)) throw std::invalid_argument("UCB alpha must be >= 0");
      return std::make_unique<UpperConfidence>(config, k, horizon, tau, seed);
    case PolicyKind::SWUCB:
      if (!(config.swucb_xi > 0.0)) throw std::invalid_argument("SW-UCB xi must be positive");
      return std::make_unique<UpperConfidence>(config, k, horizon, tau, seed);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace risingts
