#include "risingts/harness.hpp"

#include "risingts/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace risingts {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t default_stride(std::uint64_t horizon) { return std::max<std::uint64_t>(1, horizon / 10000); }

std::vector<std::uint64_t> regret_grid(std::uint64_t horizon, std::uint64_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  std::vector<std::uint64_t> grid;
  grid.reserve(horizon / stride + 2);
  for (std::uint64_t t = 0; t <= horizon; t += stride) grid.push_back(t);
  if (grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

RunRecord run_single(const Instance& instance, const PolicyConfig& config, std::uint64_t seed,
                     const RunOptions& options) {
  const std::uint64_t horizon = instance.horizon();
  auto policy = make_policy(config, instance, derive_seed(seed, 1));
  std::mt19937_64 reward_rng(derive_seed(seed, 2));
  RegretAccumulator regret(instance);

  RunRecord record;
  record.seed = seed;
  record.grid = regret_grid(horizon, options.stride == 0 ? default_stride(horizon) : options.stride);
  record.regret.reserve(record.grid.size());
  record.regret.push_back(0.0);  // grid starts at t = 0
  if (options.keep_pulls) record.pulls.reserve(horizon);

  std::size_t next_point = 1;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t arm = policy->select_arm(t);
    const std::uint64_t window_pulls = policy->window().count(arm);
    const double r_hat = regret.push(arm);
    const double mean = regret.last_mean();
    const double reward = instance.arm(arm).law.sample(mean, reward_rng);
    policy->update(arm, reward, t);
    if (options.keep_pulls) record.pulls.push_back(arm);
    if (options.observer) options.observer({t, arm, regret.counts()[arm], window_pulls, mean, reward});
    if (next_point < record.grid.size() && record.grid[next_point] == t) {
      record.regret.push_back(r_hat);
      ++next_point;
    }
  }
  record.counts = regret.counts();
  record.final_regret = regret.regret();
  record.wald_estimate = wald_upper_estimate(instance, record.counts);
  record.wald_holds = within_wald(record.final_regret, record.wald_estimate, horizon);
  return record;
}

Aggregate run_batch(const Instance& instance, const PolicyConfig& config, std::uint64_t runs,
                    std::uint64_t master_seed, unsigned threads, std::uint64_t stride) {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  // Fail on configuration problems before spawning workers.
  make_policy(config, instance, 0);

  std::vector<RunRecord> records(runs);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  RunOptions options;
  options.stride = stride;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t r = next.fetch_add(1);
      if (r >= runs) return;
      try {
        records[r] = run_single(instance, config, derive_seed(master_seed, r), options);
        records[r].run_index = r;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(runs);
        return;
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Aggregate agg;
  agg.runs = runs;
  agg.master_seed = master_seed;
  agg.grid = records.front().grid;
  const std::size_t points = agg.grid.size();
  const auto r_count = static_cast<double>(runs);
  agg.mean_regret.assign(points, 0.0);
  agg.std_regret.assign(points, 0.0);
  agg.mean_counts.assign(instance.arms_count(), 0.0);
  for (const auto& rec : records) {
    for (std::size_t g = 0; g < points; ++g) agg.mean_regret[g] += rec.regret[g];
    for (std::size_t i = 0; i < rec.counts.size(); ++i) agg.mean_counts[i] += static_cast<double>(rec.counts[i]);
    agg.final_regrets.push_back(rec.final_regret);
    if (!rec.wald_holds) ++agg.wald_violations;
  }
  for (auto& m : agg.mean_regret) m /= r_count;
  for (auto& c : agg.mean_counts) c /= r_count;
  for (const auto& rec : records) {
    for (std::size_t g = 0; g < points; ++g) {
      const double d = rec.regret[g] - agg.mean_regret[g];
      agg.std_regret[g] += d * d;
    }
  }
  for (auto& s : agg.std_regret) s = std::sqrt(s / r_count);
  return agg;
}

std::uint64_t window_from_exponent(std::uint64_t horizon, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("window exponent must be finite");
  const double tau = std::round(std::pow(static_cast<double>(horizon), alpha));
  if (tau < 1.0) return 1;
  if (tau >= static_cast<double>(horizon)) return horizon;
  return static_cast<std::uint64_t>(tau);
}

std::vector<SweepPoint> sweep(const Instance& instance, const PolicyConfig& base, SweepAxis axis,
                              const std::vector<double>& values, std::uint64_t runs, std::uint64_t master_seed,
                              unsigned threads, std::uint64_t stride) {
  if (values.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    PolicyConfig config = base;
    const double v = values[k];
    if (axis == SweepAxis::WindowExponent) {
      config.window = window_from_exponent(instance.horizon(), v);
    } else {
      if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument("forced exploration must be a whole number");
      config.forced_exploration = static_cast<std::uint64_t>(v);
    }
    const std::uint64_t seed = derive_seed(master_seed, k);
    points.push_back({v, config, seed, run_batch(instance, config, runs, seed, threads, stride)});
  }
  return points;
}

}  // namespace risingts
