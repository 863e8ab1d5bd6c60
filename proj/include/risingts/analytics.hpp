#pragma once

#include "risingts/instance.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace risingts {

/// A pull count that may be +infinity (no witness on the horizon).
using MaybeInfinite = std::optional<std::uint64_t>;

struct GapPair {
  double expected;  // Delta_i(n, n')
  double averaged;  // bar-Delta_i(n, n')
};

/// Clamped suboptimality gaps of arm i against i*(T) at pull counts (n, n').
GapPair gaps(const Instance& instance, std::size_t arm, std::uint64_t n, std::uint64_t n_prime);

struct ArmSigma {
  std::size_t arm;
  MaybeInfinite sigma;
};

struct SigmaReport {
  std::size_t optimal_arm;
  std::vector<ArmSigma> per_arm;  // suboptimal arms only, ascending index
  /// Max over suboptimal arms; 0 when the instance has a single arm.
  std::uint64_t sigma_mu;
};

/// sigma_i(T) = min { l : avg_mu_{i*}(l) > avg_mu_i(T) } for every suboptimal arm.
/// Strict comparison in double precision, no tolerance.
SigmaReport sigma(const Instance& instance);

struct WindowedComplexity {
  std::size_t arm;
  MaybeInfinite sigma_prime;          // sigma'_i(T; tau)
  std::optional<double> delta_prime;  // Delta'_i(T; tau), set when sigma'(T; tau) is finite
};

struct SigmaPrimeReport {
  std::uint64_t tau;
  std::vector<WindowedComplexity> per_arm;
  MaybeInfinite sigma_prime;  // max over suboptimal arms
};

/// Windowed complexity: the first l >= tau at which the optimal arm's
/// tau-window average beats mu_i(T). Delta'_i is evaluated at the
/// instance-wide sigma'(T; tau).
SigmaPrimeReport sigma_prime(const Instance& instance, std::uint64_t tau);

/// Upsilon(M, q) = sum_{l=1}^{M-1} max_i gamma_i(l)^q with 0^q = 0 for q > 0
/// and 0^0 = 1.
double upsilon(const Instance& instance, std::uint64_t horizon_m, double q);

/// Streaming pseudo-regret against i*(T) with rested pull counts.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(const Instance& instance);

  /// Records a pull of `arm` and returns the cumulative regret after it.
  double push(std::size_t arm);

  double regret() const;
  std::uint64_t rounds() const { return rounds_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// mu of the most recent pull, evaluated at that arm's lifetime count.
  double last_mean() const { return last_mean_; }

 private:
  const Instance* instance_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t rounds_ = 0;
  double collected_ = 0.0;
  double carry_ = 0.0;
  double last_mean_ = 0.0;
};

/// R-hat(t) for t = 1..pulls.size().
std::vector<double> pseudo_regret(const Instance& instance, std::span<const std::size_t> pulls);

/// sum_{i != i*} Delta_i(T, 1) N_i. Upper-bounds the pseudo-regret of any
/// trajectory with these pull counts.
double wald_upper_estimate(const Instance& instance, std::span<const std::uint64_t> counts);

/// Rounding slack used whenever a trajectory is compared to its Wald estimate.
inline bool within_wald(double regret, double estimate, std::uint64_t rounds) {
  return regret <= estimate + 1e-9 * static_cast<double>(rounds + 1);
}

enum class BoundFlavor { Beta, Gauss };

struct BoundRequest {
  std::uint64_t sigma;               // in [sigma_mu(T), T]
  std::uint64_t forced_exploration;  // Gamma
  BoundFlavor flavor = BoundFlavor::Beta;
  double gauss_precision = 1.0;  // gamma
  double epsilon = 1.0;          // in (0, 1], Beta flavor only
};

/// The three terms of the expected-pull bounds for ET-Beta-TS / gamma-ET-GTS.
struct ArmBoundTerms {
  std::size_t arm;
  double exploration;    // (i): Gamma
  double stationary;     // (ii)
  double dissimilarity;  // (iii)
  /// (iii) fell back to TV = 1 because the optimal arm's sample-mean law is not computable.
  bool dissimilarity_trivial = false;
};

std::vector<ArmBoundTerms> bound_terms(const Instance& instance, const BoundRequest& request);

/// Everything `analyze` reports about an instance.
struct AnalysisReport {
  std::uint64_t horizon;
  SigmaReport sigma;
  std::vector<SigmaPrimeReport> windowed;
  struct UpsilonSample {
    std::uint64_t horizon_m;
    double q;
    double value;
  };
  std::vector<UpsilonSample> upsilon;
  struct GapSample {
    std::size_t arm;
    std::uint64_t n;
    std::uint64_t n_prime;
    GapPair gap;
  };
  std::vector<GapSample> gaps;
  std::optional<BoundRequest> bound_request;
  std::vector<ArmBoundTerms> bounds;
};

struct AnalysisRequest {
  std::vector<std::uint64_t> taus;
  std::vector<double> upsilon_q = {0.25, 0.5, 0.75, 1.0};
  std::optional<std::uint64_t> upsilon_m;  // defaults to T
  /// (n, n') points tabulated for every suboptimal arm.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> gap_points;
  std::optional<BoundRequest> bounds;
};

AnalysisReport analyze(const Instance& instance, const AnalysisRequest& request);

}  // namespace risingts
