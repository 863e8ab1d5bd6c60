#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace risingts {

/// d(x, y) for Bernoulli laws, with 0 log 0 = 0. Returns +inf when y is 0 or 1
/// and x differs from it.
double bernoulli_kl(double x, double y);

/// Complementary error function.
double erfc(double x);

/// log(erfc(x)), finite for every finite x.
double log_erfc(double x);

/// log of C(n, k) p^k (1-p)^(n-k); -inf outside the support.
double binomial_log_pmf(std::uint64_t n, double p, std::uint64_t k);
double binomial_pmf(std::uint64_t n, double p, std::uint64_t k);

/// The full pmf of Bin(n, p), entries 0..n.
std::vector<double> binomial_pmf_vector(std::uint64_t n, double p);

/// P(X <= k) for X ~ Bin(n, p); k = -1 gives 0 and k >= n gives 1.
double binomial_cdf(std::uint64_t n, double p, std::int64_t k);

/// P(X > k) for X ~ Bin(n, p).
double binomial_sf(std::uint64_t n, double p, std::int64_t k);

/// P(Beta(alpha, beta) > y) for positive integer shapes, through the
/// binomial identity P(Beta(a, b) > y) = F_{a+b-1, y}(a - 1).
double beta_tail(std::uint64_t alpha, std::uint64_t beta, double y);

/// P(Beta(S + 1, N - S + 1) > y).
double posterior_tail_beta(std::uint64_t successes, std::uint64_t pulls, double y);

/// P(Normal(m, 1 / (gamma N)) > y).
double posterior_tail_gauss(double mean, std::uint64_t pulls, double precision, double y);

inline constexpr std::size_t kMaxPoissonBinomialTrials = 4096;

/// Law of a sum of independent Bernoulli(p_i).
class PoissonBinomial {
 public:
  /// Throws std::length_error past kMaxPoissonBinomialTrials trials and
  /// std::invalid_argument for entries outside [0, 1].
  explicit PoissonBinomial(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& pmf() const { return pmf_; }
  std::size_t trials() const { return probs_.size(); }
  double mean() const;

 private:
  std::vector<double> probs_;
  std::vector<double> pmf_;
};

std::vector<double> pb_pmf(std::span<const double> probs);

/// Adds one Bernoulli(p) trial to a pmf in place (size grows by one).
void convolve_bernoulli(std::vector<double>& pmf, double p);

/// Half the L1 distance between two pmfs on {0, 1, ...}; the shorter one is
/// zero-padded.
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Roos' upper bound on the TV distance between PB(probs) and Bin(n, mu).
double roos_tv_bound(std::span<const double> probs, double mu);

/// sum_s pmf(s) / F_{j+1, y}(s), with j = pmf.size() - 1.
double expect_inv_F(std::span<const double> pmf, double y);

/// Reusable buffers for the bound-term sums.
struct BoundCalcScratch {
  std::vector<double> reference;  // pmf of the stationary comparison law
  std::vector<double> actual;     // pmf of the optimal arm's sample sum
};

}  // namespace risingts
