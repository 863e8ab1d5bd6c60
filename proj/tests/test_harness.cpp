#include "risingts/analytics.hpp"
#include "risingts/catalog.hpp"
#include "risingts/harness.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace risingts;

namespace {

PolicyConfig beta_ts() { return PolicyConfig{}; }

}  // namespace

TEST_CASE("seed derivation") {
  // first splitmix64 output for state 0
  CHECK(derive_seed(0, 0) == 0xE220A8397B1DCDAFULL);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("regret grid") {
  CHECK(regret_grid(10, 3) == std::vector<std::uint64_t>{0, 3, 6, 9, 10});
  CHECK(regret_grid(10, 5) == std::vector<std::uint64_t>{0, 5, 10});
  CHECK(regret_grid(1, 1) == std::vector<std::uint64_t>{0, 1});
  CHECK(default_stride(100000) == 10);
  CHECK(default_stride(5000) == 1);
  CHECK_THROWS_AS(regret_grid(10, 0), std::invalid_argument);
}

TEST_CASE("single run bookkeeping") {
  const auto inst = catalog::stationary({0.6, 0.5, 0.2}, 1000);
  RunOptions options;
  options.stride = 100;
  options.keep_pulls = true;
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> lifetime(3, 0);
  options.observer = [&](const StepTrace& s) {
    ++steps;
    CHECK(s.t == steps);
    CHECK(s.lifetime_pulls == ++lifetime[s.arm]);
    CHECK(s.mean == inst.mu(s.arm, s.lifetime_pulls));
    CHECK((s.reward == 0.0 || s.reward == 1.0));
  };
  const auto rec = run_single(inst, beta_ts(), 17, options);
  CHECK(steps == 1000);
  CHECK(rec.grid.size() == 11);
  CHECK(rec.regret.size() == 11);
  CHECK(rec.regret.front() == 0.0);
  CHECK(rec.regret.back() == rec.final_regret);
  CHECK(rec.pulls.size() == 1000);
  CHECK(std::accumulate(rec.counts.begin(), rec.counts.end(), std::uint64_t{0}) == 1000);
  CHECK(rec.counts == lifetime);
  CHECK(pseudo_regret(inst, rec.pulls).back() == doctest::Approx(rec.final_regret).epsilon(1e-12));
  CHECK(rec.wald_holds);
  options.observer = nullptr;
  CHECK(rec == run_single(inst, beta_ts(), 17, options));
  CHECK_FALSE(rec == run_single(inst, beta_ts(), 18, options));
}

TEST_CASE("single arm has no regret") {
  const auto inst = catalog::stationary({0.4}, 300);
  for (auto kind : {PolicyKind::BetaSWTS, PolicyKind::GammaSWGTS, PolicyKind::UCB1, PolicyKind::SWUCB}) {
    PolicyConfig c;
    c.kind = kind;
    const auto rec = run_single(inst, c, 3);
    CHECK(rec.final_regret == 0.0);
  }
}

TEST_CASE("deterministic rewards equal the means") {
  const auto inst = Instance({{RewardCurve::constant(1.0), RewardLaw::bernoulli()},
                              {RewardCurve::tabulated({0.0, 0.0, 1.0}), RewardLaw::bernoulli()}},
                             200);
  RunOptions options;
  options.observer = [](const StepTrace& s) { CHECK(s.reward == s.mean); };
  PolicyConfig c;
  c.kind = PolicyKind::UCB1;
  (void)run_single(inst, c, 5, options);
}

TEST_CASE("batch of one equals the single run") {
  const auto inst = catalog::stationary({0.6, 0.5}, 500);
  const auto agg = run_batch(inst, beta_ts(), 1, 99, 1, 50);
  const auto rec = run_single(inst, beta_ts(), derive_seed(99, 0), {50, false, {}});
  CHECK(agg.mean_regret == rec.regret);
  for (double s : agg.std_regret) CHECK(s == 0.0);
  CHECK(agg.final_regrets == std::vector<double>{rec.final_regret});
  CHECK(agg.mean_counts[1] == static_cast<double>(rec.counts[1]));
}

TEST_CASE("batch results do not depend on the thread count") {
  const auto inst = catalog::fifteen_arm(2000, 3);
  for (auto kind : {PolicyKind::BetaSWTS, PolicyKind::GammaSWGTS}) {
    PolicyConfig c;
    c.kind = kind;
    c.window = 300;
    const auto one = run_batch(inst, c, 12, 5, 1);
    const auto eight = run_batch(inst, c, 12, 5, 8);
    CHECK(one == eight);
    CHECK(one.runs == 12);
    CHECK(one.wald_violations == 0);
  }
}

TEST_CASE("population standard deviation") {
  const auto inst = catalog::stationary({0.6, 0.5}, 300);
  const auto agg = run_batch(inst, beta_ts(), 7, 1);
  double mean = 0.0, var = 0.0;
  for (double r : agg.final_regrets) mean += r / 7.0;
  for (double r : agg.final_regrets) var += (r - mean) * (r - mean) / 7.0;
  CHECK(agg.mean_regret.back() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(agg.std_regret.back() == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("configuration errors surface before any run") {
  const auto inst = catalog::stationary({0.6, 0.5}, 300);
  PolicyConfig c;
  c.window = 0;
  CHECK_THROWS_AS(run_batch(inst, c, 4, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(run_batch(inst, beta_ts(), 0, 1), std::invalid_argument);
}

TEST_CASE("window exponents") {
  CHECK(window_from_exponent(10000, 1.0) == 10000);
  CHECK(window_from_exponent(10000, 0.5) == 100);
  CHECK(window_from_exponent(10000, 0.0) == 1);
  CHECK(window_from_exponent(10000, -1.0) == 1);
  CHECK(window_from_exponent(10000, 1.5) == 10000);
  CHECK(window_from_exponent(1000, 0.75) == 178);
}

TEST_CASE("sweep points") {
  const auto inst = catalog::stationary({0.6, 0.5}, 400);
  const auto points = sweep(inst, beta_ts(), SweepAxis::WindowExponent, {0.5, 1.0}, 3, 11);
  REQUIRE(points.size() == 2);
  CHECK(points[0].config.window == std::uint64_t{20});
  CHECK(points[1].config.window == std::uint64_t{400});
  CHECK(points[1].seed == derive_seed(11, 1));
  // tau = T is the unwindowed policy
  CHECK(points[1].aggregate == run_batch(inst, beta_ts(), 3, derive_seed(11, 1)));

  const auto g = sweep(inst, beta_ts(), SweepAxis::ForcedExploration, {0, 10}, 2, 11);
  CHECK(g[1].config.forced_exploration == 10);
  CHECK(g[0].aggregate == run_batch(inst, beta_ts(), 2, derive_seed(11, 0)));
  CHECK_THROWS_AS(sweep(inst, beta_ts(), SweepAxis::ForcedExploration, {1.5}, 2, 11), std::invalid_argument);
  CHECK_THROWS_AS(sweep(inst, beta_ts(), SweepAxis::ForcedExploration, {}, 2, 11), std::invalid_argument);
}
