#include "risingts/verify.hpp"

#include "risingts/dist.hpp"
#include "risingts/instance.hpp"
#include "risingts/policy.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace risingts {

std::uint64_t SuiteReport::violations() const {
  std::uint64_t total = 0;
  for (const auto& c : checks) total += c.violations;
  return total;
}

namespace {

class Tally {
 public:
  Tally(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
    result_.worst_residual = -std::numeric_limits<double>::infinity();
  }

  template <class Describe>
  void add(double residual, Describe&& describe) {
    ++result_.cases;
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (residual > result_.tolerance) ++result_.violations;
    if (residual > result_.worst_residual) {
      result_.worst_residual = residual;
      std::ostringstream os;
      describe(os);
      result_.worst_case = os.str();
    }
  }

  CheckResult take() {
    if (result_.cases == 0) result_.worst_residual = 0.0;
    return std::move(result_);
  }

 private:
  CheckResult result_;
};

double uniform(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> p(n);
  for (;;) {
    double sum = 0.0;
    for (auto& v : p) {
      v = uniform(rng);
      sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    if (mean > 0.0 && mean < 1.0) return p;
  }
}

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t size) {
  std::vector<double> w(size);
  double total = 0.0;
  for (auto& v : w) {
    v = uniform(rng);
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

std::string join(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

double mean_of(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  return s / static_cast<double>(p.size());
}

CheckResult check_beta_binomial() {
  Tally tally("beta_binomial_identity", 1e-10);
  for (std::uint64_t a = 1; a <= 50; ++a) {
    for (std::uint64_t b = 1; b <= 50; ++b) {
      for (int k = 1; k <= 19; ++k) {
        const double y = k / 20.0;
        const double ours = beta_tail(a, b, y);
        const double ref = boost::math::ibetac(static_cast<double>(a), static_cast<double>(b), y);
        tally.add(std::abs(ours - ref), [&](auto& os) { os << "alpha=" << a << " beta=" << b << " y=" << y; });
      }
    }
  }
  return tally.take();
}

CheckResult check_tv_subsets(std::mt19937_64& rng) {
  Tally tally("tv_exhaustive_subsets", 1e-13);
  for (int c = 0; c < 300; ++c) {
    const std::size_t na = 1 + rng() % 12;
    const std::size_t nb = c % 3 == 0 ? 1 + rng() % 12 : na;
    const auto a = random_pmf(rng, na);
    const auto b = random_pmf(rng, nb);
    const std::size_t m = std::max(na, nb);
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      double diff = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        if (mask >> s & 1u) diff += (s < na ? a[s] : 0.0) - (s < nb ? b[s] : 0.0);
      }
      best = std::max(best, std::abs(diff));
    }
    tally.add(std::abs(tv_distance(a, b) - best), [&](auto& os) { os << "a=" << join(a) << " b=" << join(b); });
  }
  return tally.take();
}

CheckResult check_pb_enumeration(std::mt19937_64& rng) {
  Tally tally("poisson_binomial_enumeration", 1e-13);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng() % 12;
    const auto p = random_probs(rng, n);
    std::vector<double> naive(n + 1, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double prob = 1.0;
      for (std::size_t i = 0; i < n; ++i) prob *= (mask >> i & 1u) ? p[i] : 1.0 - p[i];
      naive[std::popcount(mask)] += prob;
    }
    const auto fast = pb_pmf(p);
    double worst = 0.0;
    for (std::size_t s = 0; s <= n; ++s) worst = std::max(worst, std::abs(fast[s] - naive[s]));
    tally.add(worst, [&](auto& os) { os << "p=" << join(p); });
  }
  return tally.take();
}

CheckResult check_expectation_chain(std::mt19937_64& rng) {
  // E_PB[1/F] <= E_Bin(j, mean)[1/F] <= E_Bin(j, x)[1/F] for x <= mean.
  Tally tally("expect_inv_F_chain", 1e-9);
  for (std::size_t j = 1; j <= 10; ++j) {
    for (int v = 0; v < 200; ++v) {
      const auto p = random_probs(rng, j);
      const double mean = mean_of(p);
      const auto pb = pb_pmf(p);
      for (int yi = 1; yi <= 9; ++yi) {
        const double y = yi / 10.0;
        const double e_pb = expect_inv_F(pb, y);
        const double e_mean = expect_inv_F(binomial_pmf_vector(j, mean), y);
        tally.add((e_pb - e_mean) / e_mean, [&](auto& os) { os << "PB<=Bin(mean) p=" << join(p) << " y=" << y; });
        for (int k = 0; k <= 10; ++k) {
          const double x = mean * k / 10.0;
          const double e_x = expect_inv_F(binomial_pmf_vector(j, x), y);
          tally.add((e_mean - e_x) / e_x,
                    [&](auto& os) { os << "Bin(mean)<=Bin(x) p=" << join(p) << " y=" << y << " x=" << x; });
        }
      }
    }
  }
  return tally.take();
}

CheckResult check_roos(std::mt19937_64& rng) {
  Tally tally("roos_dominates_tv", 1e-12);
  for (int c = 0; c < 500; ++c) {
    const std::size_t n = 1 + rng() % 12;
    const auto p = random_probs(rng, n);
    const double mean = mean_of(p);
    const double tv = tv_distance(pb_pmf(p), binomial_pmf_vector(n, mean));
    tally.add(tv - roos_tv_bound(p, mean), [&](auto& os) { os << "p=" << join(p); });
  }
  return tally.take();
}

CheckResult check_binomial_ordering() {
  // F_{n,p}(k) <= F_{m,q}(k) whenever m <= n and q <= p; monotone in k.
  Tally tally("binomial_cdf_ordering", 1e-14);
  for (std::uint64_t n = 1; n <= 20; ++n) {
    for (std::uint64_t m = 1; m <= n; ++m) {
      for (int pi = 0; pi <= 10; ++pi) {
        for (int qi = 0; qi <= pi; ++qi) {
          const double p = pi / 10.0;
          const double q = qi / 10.0;
          for (std::int64_t k = -1; k <= static_cast<std::int64_t>(n); ++k) {
            tally.add(binomial_cdf(n, p, k) - binomial_cdf(m, q, k),
                      [&](auto& os) { os << "n=" << n << " p=" << p << " m=" << m << " q=" << q << " k=" << k; });
          }
        }
      }
    }
  }
  for (std::uint64_t n = 1; n <= 40; ++n) {
    for (int pi = 0; pi <= 20; ++pi) {
      const double p = pi / 20.0;
      for (std::int64_t k = 0; k <= static_cast<std::int64_t>(n); ++k) {
        tally.add(binomial_cdf(n, p, k - 1) - binomial_cdf(n, p, k),
                  [&](auto& os) { os << "monotone in k: n=" << n << " p=" << p << " k=" << k; });
      }
    }
  }
  return tally.take();
}

CheckResult check_beta_ordering() {
  Tally tally("beta_tail_ordering", 1e-14);
  for (std::uint64_t a = 1; a <= 40; ++a) {
    for (std::uint64_t b = 1; b <= 40; ++b) {
      for (int yi = 1; yi <= 19; ++yi) {
        const double y = yi / 20.0;
        const double base = beta_tail(a, b, y);
        tally.add(base - beta_tail(a + 1, b, y),
                  [&](auto& os) { os << "increasing in alpha: a=" << a << " b=" << b << " y=" << y; });
        tally.add(beta_tail(a, b + 1, y) - base,
                  [&](auto& os) { os << "decreasing in beta: a=" << a << " b=" << b << " y=" << y; });
      }
    }
  }
  return tally.take();
}

Instance random_window_instance(std::mt19937_64& rng, bool binary) {
  for (;;) {
    std::vector<Arm> arms;
    for (int i = 0; i < 5; ++i) {
      const auto law = binary ? RewardLaw::bernoulli() : RewardLaw::bounded_uniform(0.05 + 0.05 * uniform(rng));
      if (i % 2 == 0) {
        arms.push_back({RewardCurve::constant(0.2 + 0.6 * uniform(rng)), law});
      } else {
        const std::int64_t k = 100 + static_cast<std::int64_t>(rng() % 4900);
        const std::int64_t cap = 30 + static_cast<std::int64_t>(rng() % 60);
        arms.push_back({RewardCurve::linear_capped(Rational(1, k), Rational(cap, 100), Rational(-(3 * k) / 20)), law});
      }
    }
    try {
      return Instance(std::move(arms), 2000);
    } catch (const InstanceError&) {
    }
  }
}

CheckResult check_windows(std::mt19937_64& rng) {
  Tally tally("window_recount", 0.0);
  const std::uint64_t taus[] = {1, 7, 64, 2000};
  const PolicyKind kinds[] = {PolicyKind::BetaSWTS, PolicyKind::GammaSWGTS, PolicyKind::UCB1, PolicyKind::SWUCB};
  struct Event {
    std::uint64_t stamp;
    std::size_t arm;
    Int128 reward;
  };
  for (int trace = 0; trace < 100; ++trace) {
    const PolicyKind kind = kinds[trace % 4];
    const Instance instance = random_window_instance(rng, kind == PolicyKind::BetaSWTS || trace % 8 < 4);
    for (std::uint64_t tau : taus) {
      PolicyConfig config;
      config.kind = kind;
      config.window = tau;
      config.forced_exploration = rng() % 6;
      const std::uint64_t seed = rng();
      auto policy = make_policy(config, instance, seed);
      std::mt19937_64 env(rng());
      std::vector<std::uint64_t> pulls(instance.arms_count(), 0);
      std::vector<Event> history;
      std::uint64_t mismatches = 0;
      std::uint64_t first_bad = 0;
      for (std::uint64_t t = 1; t <= instance.horizon(); ++t) {
        const std::size_t arm = policy->select_arm(t);
        ++pulls[arm];
        const double reward = instance.arm(arm).law.sample(instance.mu(arm, pulls[arm]), env);
        policy->update(arm, reward, t);
        history.push_back({t, arm, quantize_reward(reward)});

        const std::uint64_t lo = t + 1 > tau ? t + 1 - tau : 1;
        std::vector<std::uint64_t> n(instance.arms_count(), 0);
        std::vector<Int128> s(instance.arms_count(), 0);
        for (auto it = history.rbegin(); it != history.rend() && it->stamp >= lo; ++it) {
          ++n[it->arm];
          s[it->arm] += it->reward;
        }
        const auto& w = policy->window();
        for (std::size_t i = 0; i < instance.arms_count(); ++i) {
          if (w.count(i) != n[i] || w.fixed_sum(i) != s[i] || w.sum(i) != dequantize(s[i]) ||
              w.lifetime(i) != pulls[i]) {
            if (mismatches++ == 0) first_bad = t;
          }
        }
      }
      tally.add(static_cast<double>(mismatches), [&](auto& os) {
        os << "trace=" << trace << " kind=" << policy_kind_name(kind) << " tau=" << tau << " first mismatch at t="
           << first_bad;
      });
    }
  }
  return tally.take();
}

}  // namespace

SuiteReport verify_identities(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteReport report{"identities", {}};
  report.checks.push_back(check_beta_binomial());
  report.checks.push_back(check_tv_subsets(rng));
  report.checks.push_back(check_pb_enumeration(rng));
  return report;
}

SuiteReport verify_lemmas(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteReport report{"lemmas", {}};
  report.checks.push_back(check_expectation_chain(rng));
  report.checks.push_back(check_roos(rng));
  report.checks.push_back(check_binomial_ordering());
  report.checks.push_back(check_beta_ordering());
  return report;
}

SuiteReport verify_windows(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {"windows", {check_windows(rng)}};
}

std::vector<SuiteReport> verify_suite(std::string_view name) {
  if (name == "identities") return {verify_identities()};
  if (name == "lemmas") return {verify_lemmas()};
  if (name == "windows") return {verify_windows()};
  if (name == "all") return {verify_identities(), verify_lemmas(), verify_windows()};
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

}  // namespace risingts
