#pragma once

#include "risingts/instance.hpp"
#include "risingts/int128.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace risingts {

enum class PolicyKind { BetaSWTS, GammaSWGTS, UCB1, SWUCB };

std::string_view policy_kind_name(PolicyKind kind);
/// Inverse of policy_kind_name; throws std::invalid_argument on unknown names.
PolicyKind parse_policy_kind(std::string_view name);

/// Named variants are parameterizations: Beta-TS is BetaSWTS with Gamma = 0
/// and no window, gamma-GTS is GammaSWGTS with Gamma = 1, and so on.
struct PolicyConfig {
  PolicyKind kind = PolicyKind::BetaSWTS;
  std::uint64_t forced_exploration = 0;  // Gamma: round-robin pulls per arm
  std::optional<std::uint64_t> window;   // tau; unset means T (SW-UCB: ceil(4 sqrt(T ln T)))
  std::optional<double> precision;       // gamma; unset means min(1 / (4 lambda^2), 1)
  double ucb_alpha = 2.0;
  double swucb_xi = 0.6;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// ceil(4 sqrt(T ln T)), clamped to [1, T].
std::uint64_t default_swucb_window(std::uint64_t horizon);

/// min(1 / (4 lambda^2), 1) for the largest subgaussian parameter among the arms.
double default_precision(const Instance& instance);

/// Fixed-point reward with 64 fractional bits. Window sums are kept in this
/// form so adding and evicting rewards is exact and order-free.
Int128 quantize_reward(double reward);
double dequantize(Int128 fixed);

/// Per-arm sliding window over round stamps, with running N and S.
///
/// After record(arm, x, t) only stamps >= t + 1 - tau are kept, so before
/// round t + 1 the window is { s : max(t + 1 - tau, 1) <= s <= t }.
class SlidingWindow {
 public:
  SlidingWindow(std::size_t arms, std::uint64_t tau);

  void record(std::size_t arm, double reward, std::uint64_t t);
  /// Drops every entry with stamp < `stamp`.
  void evict_before(std::uint64_t stamp);

  std::uint64_t tau() const { return tau_; }
  std::size_t arms() const { return entries_.size(); }
  std::uint64_t count(std::size_t arm) const { return entries_[arm].size(); }
  Int128 fixed_sum(std::size_t arm) const { return sums_[arm]; }
  double sum(std::size_t arm) const { return dequantize(sums_[arm]); }
  std::uint64_t lifetime(std::size_t arm) const { return lifetime_[arm]; }
  /// Oldest stamp held for `arm`; only valid when count(arm) > 0.
  std::uint64_t front_stamp(std::size_t arm) const { return entries_[arm].front().stamp; }

 private:
  struct Entry {
    std::uint64_t stamp;
    Int128 reward;
  };
  std::uint64_t tau_;
  std::vector<std::deque<Entry>> entries_;
  std::vector<Int128> sums_;
  std::vector<std::uint64_t> lifetime_;
};

/// Sequential decision maker: select_arm(t) then update(arm, reward, t) for t = 1, 2, ...
class BanditPolicy {
 public:
  BanditPolicy(const PolicyConfig& config, std::size_t arms, std::uint64_t horizon, std::uint64_t tau,
               std::uint64_t seed);
  virtual ~BanditPolicy() = default;

  /// Throws std::out_of_range for t outside [1, T].
  std::size_t select_arm(std::uint64_t t);
  /// Throws std::invalid_argument when t does not increase or the reward is
  /// not accepted by the policy.
  void update(std::size_t arm, double reward, std::uint64_t t);

  const SlidingWindow& window() const { return window_; }
  const PolicyConfig& config() const { return config_; }
  std::size_t arms() const { return window_.arms(); }
  std::uint64_t horizon() const { return horizon_; }

 protected:
  /// Called after forced exploration; window already evicted for round t.
  virtual std::size_t choose(std::uint64_t t) = 0;
  virtual void check_reward(double reward) const;

  /// Uniform choice among indices whose score equals the maximum.
  std::size_t argmax_random_ties(const std::vector<double>& scores);

  std::mt19937_64 rng_;
  SlidingWindow window_;

 private:
  PolicyConfig config_;
  std::uint64_t horizon_;
  std::uint64_t last_update_ = 0;
  std::vector<std::size_t> ties_;
};

/// Builds the policy for `instance`, resolving default tau and gamma.
/// Throws std::invalid_argument on out-of-range parameters or a Beta policy
/// on non-binary rewards.
std::unique_ptr<BanditPolicy> make_policy(const PolicyConfig& config, const Instance& instance, std::uint64_t seed);

}  // namespace risingts
