#include "risingts/analytics.hpp"

#include "risingts/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace risingts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_suboptimal(const Instance& instance, std::size_t arm) {
  if (arm >= instance.arms_count()) throw std::out_of_range("arm index out of range");
  if (arm == instance.optimal_arm()) throw std::invalid_argument("gaps are defined for suboptimal arms only");
}

void require_pull_index(const Instance& instance, std::uint64_t n, const char* what) {
  if (n == 0 || n > instance.horizon()) {
    throw std::invalid_argument(std::string(what) + ": pull count must lie in [1, T]");
  }
}

// term * exp(-log_denominator) without forming the denominator.
double scaled(double tv, double log_denominator) {
  if (tv == 0.0) return 0.0;
  return std::exp(std::log(tv) - log_denominator);
}

// sum_{j=first}^{sigma-1} TV(Bin(j, avg*(j)), Bin(j, avg*(sigma))) / (1 - avg*(sigma))^{j+1}
double beta_dissimilarity(const Instance& instance, std::uint64_t sigma, std::uint64_t first,
                          BoundCalcScratch& scratch) {
  const std::size_t best = instance.optimal_arm();
  const double y = instance.avg_mu(best, sigma);
  const double log_base = std::log1p(-y);
  double total = 0.0;
  for (std::uint64_t j = std::max<std::uint64_t>(first, 1); j < sigma; ++j) {
    const double x = instance.avg_mu(best, j);
    if (x == y) continue;
    scratch.actual = binomial_pmf_vector(j, x);
    scratch.reference = binomial_pmf_vector(j, y);
    total += scaled(tv_distance(scratch.actual, scratch.reference), static_cast<double>(j + 1) * log_base);
  }
  return total;
}

// Same sum with the sample-sum law of the optimal arm (Poisson-binomial over its
// first j means) against Bin(j, avg*(sigma)), divided by erfc(sqrt(gamma j / 2) avg*(sigma)).
// Without Bernoulli rewards the TV factor is replaced by 1.
double gauss_dissimilarity(const Instance& instance, std::uint64_t sigma, std::uint64_t first, double precision,
                           bool trivial, BoundCalcScratch& scratch) {
  const std::size_t best = instance.optimal_arm();
  const double y = instance.avg_mu(best, sigma);
  double total = 0.0;
  scratch.actual.assign(1, 1.0);
  for (std::uint64_t j = 1; j < sigma; ++j) {
    if (!trivial) convolve_bernoulli(scratch.actual, instance.mu(best, j));
    if (j < first) continue;
    const double log_denominator = log_erfc(std::sqrt(precision * static_cast<double>(j) / 2.0) * y);
    double tv = 1.0;
    if (!trivial) {
      scratch.reference = binomial_pmf_vector(j, y);
      tv = tv_distance(scratch.actual, scratch.reference);
    }
    total += scaled(tv, log_denominator);
  }
  return total;
}

}  // namespace

GapPair gaps(const Instance& instance, std::size_t arm, std::uint64_t n, std::uint64_t n_prime) {
  require_suboptimal(instance, arm);
  require_pull_index(instance, n, "gaps");
  require_pull_index(instance, n_prime, "gaps");
  const std::size_t best = instance.optimal_arm();
  return {std::max(0.0, instance.mu(best, n) - instance.mu(arm, n_prime)),
          std::max(0.0, instance.avg_mu(best, n) - instance.avg_mu(arm, n_prime))};
}

SigmaReport sigma(const Instance& instance) {
  const std::uint64_t horizon = instance.horizon();
  const std::size_t best = instance.optimal_arm();
  SigmaReport report{best, {}, 0};
  for (std::size_t i = 0; i < instance.arms_count(); ++i) {
    if (i == best) continue;
    const double target = instance.avg_mu(i, horizon);
    MaybeInfinite witness;
    for (std::uint64_t l = 1; l <= horizon; ++l) {
      if (instance.avg_mu(best, l) > target) {
        witness = l;
        break;
      }
    }
    // Uniqueness of the optimum makes l = T a witness.
    if (!witness) throw std::logic_error("sigma: no witness at the horizon for a suboptimal arm");
    report.per_arm.push_back({i, witness});
    report.sigma_mu = std::max(report.sigma_mu, *witness);
  }
  return report;
}

SigmaPrimeReport sigma_prime(const Instance& instance, std::uint64_t tau) {
  const std::uint64_t horizon = instance.horizon();
  if (tau == 0 || tau > horizon) throw std::invalid_argument("sigma_prime: window must lie in [1, T]");
  const std::size_t best = instance.optimal_arm();
  SigmaPrimeReport report{tau, {}, std::uint64_t{0}};
  for (std::size_t i = 0; i < instance.arms_count(); ++i) {
    if (i == best) continue;
    const double target = instance.mu(i, horizon);
    MaybeInfinite witness;
    for (std::uint64_t l = tau; l <= horizon; ++l) {
      if (instance.windowed_avg_mu(best, l, tau) > target) {
        witness = l;
        break;
      }
    }
    report.per_arm.push_back({i, witness, std::nullopt});
    if (!witness) {
      report.sigma_prime = std::nullopt;
    } else if (report.sigma_prime) {
      report.sigma_prime = std::max(*report.sigma_prime, *witness);
    }
  }
  if (report.sigma_prime && !report.per_arm.empty()) {
    const double reference = instance.windowed_avg_mu(best, *report.sigma_prime, tau);
    for (auto& entry : report.per_arm) entry.delta_prime = reference - instance.mu(entry.arm, horizon);
  }
  return report;
}

double upsilon(const Instance& instance, std::uint64_t horizon_m, double q) {
  if (horizon_m < 2) throw std::invalid_argument("upsilon: M must be >= 2");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("upsilon: q must lie in [0, 1]");
  double total = 0.0;
  std::vector<double> previous(instance.arms_count());
  for (std::size_t i = 0; i < instance.arms_count(); ++i) previous[i] = instance.mu(i, 1);
  for (std::uint64_t l = 1; l < horizon_m; ++l) {
    double increment = 0.0;
    for (std::size_t i = 0; i < instance.arms_count(); ++i) {
      const double next = instance.mu(i, l + 1);
      increment = std::max(increment, next - previous[i]);
      previous[i] = next;
    }
    if (q == 0.0) {
      total += 1.0;
    } else if (increment > 0.0) {
      total += std::pow(increment, q);
    }
  }
  return total;
}

RegretAccumulator::RegretAccumulator(const Instance& instance)
    : instance_(&instance), counts_(instance.arms_count(), 0) {}

double RegretAccumulator::push(std::size_t arm) {
  if (arm >= counts_.size()) throw std::out_of_range("regret: arm index out of range");
  if (rounds_ >= instance_->horizon()) throw std::out_of_range("regret: more pulls than the horizon");
  ++rounds_;
  last_mean_ = instance_->mu(arm, ++counts_[arm]);
  const double t = collected_ + last_mean_;
  carry_ += std::fabs(collected_) >= std::fabs(last_mean_) ? (collected_ - t) + last_mean_
                                                           : (last_mean_ - t) + collected_;
  collected_ = t;
  return regret();
}

double RegretAccumulator::regret() const {
  return instance_->prefix_sum(instance_->optimal_arm(), rounds_) - (collected_ + carry_);
}

std::vector<double> pseudo_regret(const Instance& instance, std::span<const std::size_t> pulls) {
  RegretAccumulator acc(instance);
  std::vector<double> trajectory;
  trajectory.reserve(pulls.size());
  for (std::size_t arm : pulls) trajectory.push_back(acc.push(arm));
  return trajectory;
}

double wald_upper_estimate(const Instance& instance, std::span<const std::uint64_t> counts) {
  if (counts.size() != instance.arms_count()) throw std::invalid_argument("wald: one count per arm expected");
  std::uint64_t total_pulls = 0;
  for (auto c : counts) total_pulls += c;
  if (total_pulls > instance.horizon()) throw std::invalid_argument("wald: counts exceed the horizon");
  const std::size_t best = instance.optimal_arm();
  const double top = instance.mu(best, instance.horizon());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i == best) continue;
    total += std::max(0.0, top - instance.mu(i, 1)) * static_cast<double>(counts[i]);
  }
  return total;
}

std::vector<ArmBoundTerms> bound_terms(const Instance& instance, const BoundRequest& request) {
  const std::uint64_t horizon = instance.horizon();
  const SigmaReport report = sigma(instance);
  if (request.sigma < std::max<std::uint64_t>(report.sigma_mu, 1) || request.sigma > horizon) {
    throw std::invalid_argument("bound terms: sigma must lie in [sigma_mu(T), T] (sigma_mu(T) = " +
                                std::to_string(report.sigma_mu) + ")");
  }
  bool all_bernoulli = true;
  for (const auto& arm : instance.arms()) all_bernoulli = all_bernoulli && arm.law.binary();

  if (request.flavor == BoundFlavor::Beta) {
    if (!all_bernoulli) throw std::invalid_argument("bound terms: the Beta flavor needs Bernoulli rewards");
    if (!(request.epsilon > 0.0 && request.epsilon <= 1.0)) {
      throw std::invalid_argument("bound terms: epsilon must lie in (0, 1]");
    }
  } else if (!(request.gauss_precision > 0.0)) {
    throw std::invalid_argument("bound terms: gamma must be positive");
  }

  const std::size_t best = instance.optimal_arm();
  const double reference = instance.avg_mu(best, request.sigma);
  const double log_t = std::log(static_cast<double>(horizon));
  BoundCalcScratch scratch;
  const bool trivial = request.flavor == BoundFlavor::Gauss && !all_bernoulli;
  const double dissimilarity =
      request.flavor == BoundFlavor::Beta
          ? beta_dissimilarity(instance, request.sigma, request.forced_exploration, scratch)
          : gauss_dissimilarity(instance, request.sigma, request.forced_exploration, request.gauss_precision, trivial,
                                scratch);

  std::vector<ArmBoundTerms> terms;
  for (const auto& entry : report.per_arm) {
    const double avg_i = instance.avg_mu(entry.arm, horizon);
    double stationary = 0.0;
    if (request.flavor == BoundFlavor::Beta) {
      const double eps = request.epsilon;
      const double d = bernoulli_kl(avg_i, reference);
      stationary = (d == 0.0 ? kInf : (1.0 + eps) * log_t / d) + 1.0 / (eps * eps);
    } else {
      const double gap = gaps(instance, entry.arm, request.sigma, horizon).averaged;
      const double g2 = gap * gap;
      stationary = g2 == 0.0 ? kInf
                             : std::log(static_cast<double>(horizon) * g2 + std::exp(6.0)) /
                                   (request.gauss_precision * g2);
    }
    terms.push_back({entry.arm, static_cast<double>(request.forced_exploration), stationary, dissimilarity, trivial});
  }
  return terms;
}

AnalysisReport analyze(const Instance& instance, const AnalysisRequest& request) {
  AnalysisReport report{instance.horizon(), sigma(instance), {}, {}, {}, request.bounds, {}};
  for (auto tau : request.taus) report.windowed.push_back(sigma_prime(instance, tau));
  const std::uint64_t m = request.upsilon_m.value_or(instance.horizon());
  if (m >= 2) {
    for (double q : request.upsilon_q) report.upsilon.push_back({m, q, upsilon(instance, m, q)});
  }
  for (const auto& [n, n_prime] : request.gap_points) {
    for (const auto& entry : report.sigma.per_arm) {
      report.gaps.push_back({entry.arm, n, n_prime, gaps(instance, entry.arm, n, n_prime)});
    }
  }
  if (request.bounds) report.bounds = bound_terms(instance, *request.bounds);
  return report;
}

}  // namespace risingts
