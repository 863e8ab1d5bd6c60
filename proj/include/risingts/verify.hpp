#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace risingts {

/// One family of checks inside a suite.
struct CheckResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  double worst_residual = 0.0;  // signed slack of the worst case; > tolerance means a violation
  double tolerance = 0.0;
  std::string worst_case;       // human-readable parameters of the worst case
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  std::uint64_t violations() const;
  bool passed() const { return violations() == 0; }
};

/// Beta-Binomial residual against an incomplete-beta reference, TV against
/// exhaustive subset enumeration, and PB pmf against subset-sum enumeration.
SuiteReport verify_identities(std::uint64_t seed = 1);

/// The E[1 / F] ordering chain, Roos' bound, and binomial/beta monotonicity.
SuiteReport verify_lemmas(std::uint64_t seed = 2);

/// Sliding-window (N, S) against brute-force recounts after every round.
SuiteReport verify_windows(std::uint64_t seed = 3);

/// "identities", "lemmas", "windows" or "all". Throws std::invalid_argument otherwise.
std::vector<SuiteReport> verify_suite(std::string_view name);

}  // namespace risingts
