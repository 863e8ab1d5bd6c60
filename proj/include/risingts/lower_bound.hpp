#pragma once

#include "risingts/instance.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace risingts {

/// The pair of deterministic instances behind the minimax lower bound
/// K (sigma_bar - 2) / 64 over instances with sigma_mu(T) <= sigma_bar.
///
/// Arm 0 saturates at 1/2, every other arm at 1/4, all rising with slope
/// 1 / (2s) from zero, s = (sigma_bar - 2) / 2. mu_prime raises the cap of
/// `boosted_arm` to 1. For s = 0 the slope is 1, which already jumps to the
/// cap at the second pull.
struct LowerBoundConstruction {
  Instance mu;
  Instance mu_prime;
  double bound;
  Rational internal_sigma;
  std::size_t boosted_arm;
};

/// Requires K >= 2 and 2 <= sigma_bar <= (T - 1) / 2. `boosted_arm` must be
/// in [1, K - 1] and defaults to K - 1.
LowerBoundConstruction lower_bound_instances(std::size_t arms, std::uint64_t sigma_bar, std::uint64_t horizon,
                                             std::optional<std::size_t> boosted_arm = std::nullopt);

/// Exact prefix sums of an instance whose arms are all linear-capped,
/// scaled by a common denominator so every entry is an integer.
class ExactPrefixTable {
 public:
  /// Throws std::invalid_argument for other curve families and
  /// std::overflow_error when the scaled sums do not fit 64 bits.
  explicit ExactPrefixTable(const Instance& instance);

  std::int64_t denominator() const { return denominator_; }
  /// D * sum_{l=1}^{t} mu_i(l).
  std::int64_t scaled_prefix(std::size_t i, std::uint64_t t) const { return prefix_[i][t]; }
  Rational avg(std::size_t i, std::uint64_t t) const;

  /// Exact i*(T); throws InstanceError on a tie.
  std::size_t optimal_arm() const;
  /// Exact sigma_mu(T): strict comparisons carried out in integers.
  std::uint64_t sigma_mu() const;

 private:
  std::uint64_t horizon_;
  std::int64_t denominator_ = 1;
  std::vector<std::vector<std::int64_t>> prefix_;
};

struct LowerBoundCheck {
  Rational min_gap_mu;        // min over suboptimal arms of bar-Delta_{i, mu}(T, T)
  Rational gap_mu_prime;      // bar-Delta_{0, mu'}(T, T)
  std::uint64_t sigma_mu;     // exact sigma_mu(T) of mu
  std::uint64_t sigma_mu_prime;
  bool gap_ok;                // min_gap_mu >= 5/32
  bool gap_prime_ok;          // gap_mu_prime >= 1/8
  bool member;                // both sigma values <= sigma_bar
  bool member_relaxed;        // both sigma values <= 2 sigma_bar + 2
};

LowerBoundCheck check_lower_bound(const LowerBoundConstruction& construction, std::uint64_t sigma_bar);

}  // namespace risingts
