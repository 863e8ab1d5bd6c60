#pragma once

#include "risingts/instance.hpp"
#include "risingts/policy.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace risingts {

/// Stateless child seed: a splitmix64 finalizer over (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// max(1, T / 10^4).
std::uint64_t default_stride(std::uint64_t horizon);

/// {0, stride, 2 stride, ...} plus T.
std::vector<std::uint64_t> regret_grid(std::uint64_t horizon, std::uint64_t stride);

/// One round as seen by the environment.
struct StepTrace {
  std::uint64_t t;
  std::size_t arm;
  std::uint64_t lifetime_pulls;  // N of the pulled arm including this pull
  std::uint64_t window_pulls;    // policy window count before the update
  double mean;                   // mu_arm(lifetime_pulls)
  double reward;
};

struct RunOptions {
  std::uint64_t stride = 0;  // 0 selects default_stride(T)
  bool keep_pulls = false;
  std::function<void(const StepTrace&)> observer;
};

struct RunRecord {
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> pulls;  // filled only with keep_pulls
  std::vector<std::uint64_t> grid;
  std::vector<double> regret;  // R-hat on the grid
  std::vector<std::uint64_t> counts;
  double final_regret = 0.0;
  double wald_estimate = 0.0;
  bool wald_holds = true;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Simulates T rounds. The policy stream and the reward stream are derived
/// from `seed` separately, so the policy never sees reward randomness.
RunRecord run_single(const Instance& instance, const PolicyConfig& config, std::uint64_t seed,
                     const RunOptions& options = {});

struct Aggregate {
  std::vector<std::uint64_t> grid;
  std::vector<double> mean_regret;
  std::vector<double> std_regret;  // population convention (divide by R)
  std::vector<double> mean_counts;
  std::vector<double> final_regrets;  // per run, in run-index order
  std::uint64_t runs = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t wald_violations = 0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

/// R runs with child seeds derive_seed(master_seed, r), spread over
/// `threads` workers. The reduction runs in run-index order, so the result
/// does not depend on the thread count.
Aggregate run_batch(const Instance& instance, const PolicyConfig& config, std::uint64_t runs,
                    std::uint64_t master_seed, unsigned threads = 1, std::uint64_t stride = 0);

enum class SweepAxis { WindowExponent, ForcedExploration };

/// round(T^alpha) clamped to [1, T].
std::uint64_t window_from_exponent(std::uint64_t horizon, double alpha);

struct SweepPoint {
  double axis_value;
  PolicyConfig config;  // with the axis parameter resolved
  std::uint64_t seed;
  Aggregate aggregate;
};

/// One run_batch per grid value, seeded by derive_seed(master_seed, index).
std::vector<SweepPoint> sweep(const Instance& instance, const PolicyConfig& base, SweepAxis axis,
                              const std::vector<double>& values, std::uint64_t runs, std::uint64_t master_seed,
                              unsigned threads = 1, std::uint64_t stride = 0);

}  // namespace risingts
