#include "risingts/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace risingts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stirling-formula remainder: log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    if (n == 0.0) return 0.0;  // limit term, never used with a zero count
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - half_log_2pi;
  }
  const double nn = n * n;
  if (n > 500.0) return (S0 - S1 / nn) / n;
  if (n > 80.0) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35.0) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / np) + np - x, stable when x is close to np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

// Loader's saddle-point evaluation, in log space.
double log_dbinom(double x, double n, double p, double q) {
  if (p == 0.0) return x == 0.0 ? 0.0 : -kInf;
  if (q == 0.0) return x == n ? 0.0 : -kInf;
  if (x == 0.0) {
    if (n == 0.0) return 0.0;
    return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": probability outside [0, 1]");
}

std::uint64_t binomial_mode(std::uint64_t n, double p) {
  const double m = std::floor((static_cast<double>(n) + 1.0) * p);
  return std::min<std::uint64_t>(n, static_cast<std::uint64_t>(std::max(0.0, m)));
}

// sum_{s <= k} pmf(s) for k below the mode: terms shrink as s decreases.
double lower_tail_sum(std::uint64_t n, double p, std::uint64_t k) {
  const double q = 1.0 - p;
  double term = binomial_pmf(n, p, k);
  double sum = term;
  const double ratio_scale = q / p;
  for (std::uint64_t s = k; s > 0 && term > 0.0; --s) {
    term *= static_cast<double>(s) / static_cast<double>(n - s + 1) * ratio_scale;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// sum_{s >= k} pmf(s) for k above the mode: terms shrink as s increases.
double upper_tail_sum(std::uint64_t n, double p, std::uint64_t k) {
  const double q = 1.0 - p;
  double term = binomial_pmf(n, p, k);
  double sum = term;
  const double ratio_scale = p / q;
  for (std::uint64_t s = k; s < n && term > 0.0; ++s) {
    term *= static_cast<double>(n - s) / static_cast<double>(s + 1) * ratio_scale;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

double bernoulli_kl(double x, double y) {
  check_probability(x, "bernoulli_kl");
  check_probability(y, "bernoulli_kl");
  if (x == y) return 0.0;
  if (y == 0.0 || y == 1.0) return kInf;
  double d = 0.0;
  if (x > 0.0) d += x * std::log(x / y);
  if (x < 1.0) d += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return std::max(0.0, d);
}

double erfc(double x) { return std::erfc(x); }

double log_erfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  // Asymptotic expansion erfc(x) ~ exp(-x^2) / (x sqrt(pi)) sum_k (-1)^k (2k-1)!! / (2x^2)^k.
  const double inv = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv;
    series += term;
  }
  return -x * x - std::log(x) - 0.5 * std::log(std::numbers::pi) + std::log(series);
}

double binomial_log_pmf(std::uint64_t n, double p, std::uint64_t k) {
  check_probability(p, "binomial_log_pmf");
  if (k > n) return -kInf;
  return log_dbinom(static_cast<double>(k), static_cast<double>(n), p, 1.0 - p);
}

double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) { return std::exp(binomial_log_pmf(n, p, k)); }

std::vector<double> binomial_pmf_vector(std::uint64_t n, double p) {
  check_probability(p, "binomial_pmf_vector");
  std::vector<double> pmf(n + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  const double q = 1.0 - p;
  const std::uint64_t m = binomial_mode(n, p);
  pmf[m] = binomial_pmf(n, p, m);
  for (std::uint64_t s = m; s > 0; --s) {
    pmf[s - 1] = pmf[s] * static_cast<double>(s) / static_cast<double>(n - s + 1) * (q / p);
  }
  for (std::uint64_t s = m; s < n; ++s) {
    pmf[s + 1] = pmf[s] * static_cast<double>(n - s) / static_cast<double>(s + 1) * (p / q);
  }
  return pmf;
}

double binomial_cdf(std::uint64_t n, double p, std::int64_t k) {
  check_probability(p, "binomial_cdf");
  if (k < 0) return 0.0;
  const auto ku = static_cast<std::uint64_t>(k);
  if (ku >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  if (ku < binomial_mode(n, p)) return std::min(1.0, lower_tail_sum(n, p, ku));
  return std::max(0.0, 1.0 - upper_tail_sum(n, p, ku + 1));
}

double binomial_sf(std::uint64_t n, double p, std::int64_t k) {
  check_probability(p, "binomial_sf");
  if (k < 0) return 1.0;
  const auto ku = static_cast<std::uint64_t>(k);
  if (ku >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (ku + 1 > binomial_mode(n, p)) return std::min(1.0, upper_tail_sum(n, p, ku + 1));
  return std::max(0.0, 1.0 - lower_tail_sum(n, p, ku));
}

double beta_tail(std::uint64_t alpha, std::uint64_t beta, double y) {
  if (alpha == 0 || beta == 0) throw std::invalid_argument("beta_tail: shapes must be positive integers");
  check_probability(y, "beta_tail");
  return binomial_cdf(alpha + beta - 1, y, static_cast<std::int64_t>(alpha - 1));
}

double posterior_tail_beta(std::uint64_t successes, std::uint64_t pulls, double y) {
  if (successes > pulls) throw std::invalid_argument("posterior_tail_beta: more successes than pulls");
  return beta_tail(successes + 1, pulls - successes + 1, y);
}

double posterior_tail_gauss(double mean, std::uint64_t pulls, double precision, double y) {
  if (pulls == 0) throw std::invalid_argument("posterior_tail_gauss: needs at least one pull");
  if (!(precision > 0.0)) throw std::invalid_argument("posterior_tail_gauss: precision must be positive");
  return 0.5 * erfc((y - mean) * std::sqrt(precision * static_cast<double>(pulls) / 2.0));
}

void convolve_bernoulli(std::vector<double>& pmf, double p) {
  const double q = 1.0 - p;
  pmf.push_back(0.0);
  for (std::size_t k = pmf.size() - 1; k > 0; --k) pmf[k] = pmf[k] * q + pmf[k - 1] * p;
  pmf[0] *= q;
}

PoissonBinomial::PoissonBinomial(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() > kMaxPoissonBinomialTrials) {
    throw std::length_error("Poisson-binomial: at most " + std::to_string(kMaxPoissonBinomialTrials) + " trials");
  }
  for (double p : probs_) check_probability(p, "Poisson-binomial");
  pmf_.reserve(probs_.size() + 1);
  pmf_.push_back(1.0);
  for (double p : probs_) convolve_bernoulli(pmf_, p);
  double total = 0.0;
  for (double v : pmf_) total += v;
  if (std::fabs(total - 1.0) > 1e-13) {
    for (double& v : pmf_) v /= total;
  }
}

double PoissonBinomial::mean() const {
  double m = 0.0;
  for (double p : probs_) m += p;
  return m;
}

std::vector<double> pb_pmf(std::span<const double> probs) {
  return PoissonBinomial(std::vector<double>(probs.begin(), probs.end())).pmf();
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = s < a.size() ? a[s] : 0.0;
    const double y = s < b.size() ? b[s] : 0.0;
    sum += std::fabs(x - y);
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double roos_tv_bound(std::span<const double> probs, double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("roos_tv_bound: mu must lie in (0, 1)");
  if (probs.empty()) return 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  for (double p : probs) {
    check_probability(p, "roos_tv_bound");
    g1 += mu - p;
    g2 += (mu - p) * (mu - p);
  }
  const double eta = 2.0 * g2 + g1 * g1;
  const double n = static_cast<double>(probs.size());
  const double theta = eta / (2.0 * n * mu * (1.0 - mu));
  if (theta < 1.0) {
    const double c1 = std::sqrt(std::numbers::e) / 2.0;
    const double root = std::sqrt(theta);
    return c1 * root / ((1.0 - root) * (1.0 - root));
  }
  const double c2 = std::pow(2.0 * std::numbers::pi, 0.25) * std::exp(1.0 / 24.0) / std::sqrt(2.0);
  return c2 * std::sqrt(eta) * (1.0 + std::sqrt(2.0 * eta)) * std::exp(2.0 * eta);
}

double expect_inv_F(std::span<const double> pmf, double y) {
  if (pmf.empty()) throw std::invalid_argument("expect_inv_F: empty pmf");
  const std::uint64_t trials = pmf.size();  // j + 1
  double total = 0.0;
  for (std::size_t s = 0; s < pmf.size(); ++s) {
    if (pmf[s] == 0.0) continue;
    total += pmf[s] / binomial_cdf(trials, y, static_cast<std::int64_t>(s));
  }
  return total;
}

}  // namespace risingts
