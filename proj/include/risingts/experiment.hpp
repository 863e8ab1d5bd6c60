#pragma once

#include "risingts/analytics.hpp"
#include "risingts/harness.hpp"
#include "risingts/instance_io.hpp"
#include "risingts/lower_bound.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace risingts {

inline constexpr const char* kVersion = "1.0.0";

struct LabeledPolicy {
  std::string label;
  PolicyConfig config;
};

struct SweepSpec {
  SweepAxis axis;
  std::vector<double> values;
};

/// One JSON document describing a run or a sweep.
///
/// {"instance": {...} | "instance_file": "path", "horizon": T?, "runs": R,
///  "seed": S, "stride": k?, "policies": [{"label", "kind", ...}],
///  "sweep": {"axis": "window_exponent" | "forced_exploration", "values": [...]}?}
///
/// A relative instance_file is resolved against the config file's directory.
struct ExperimentConfig {
  Json instance_doc;  // as parsed, before any horizon override
  std::optional<std::uint64_t> horizon;
  std::uint64_t runs = 1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> stride;
  std::vector<LabeledPolicy> policies;
  std::optional<SweepSpec> sweep;
};

/// Throws ConfigError on schema problems.
ExperimentConfig parse_experiment_config(const Json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

Json policy_config_to_json(const PolicyConfig& config);
PolicyConfig policy_config_from_json(const Json& doc, const std::string& where);

/// The instance with the configured horizon applied.
Instance build_instance(const ExperimentConfig& config);

/// CSV with header grid_t,mean_regret,std_regret and 12 significant digits.
std::string aggregate_csv(const Aggregate& aggregate);

/// Runs every policy (seed derive_seed(seed, policy index)) and writes
/// <label>.csv per policy plus results.json into `out`. Files are written only
/// after every batch succeeds; anything written before a failure is removed.
/// Returns the results document.
Json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out, unsigned threads);

/// Sweep variant: <label>_sweep.csv with axis_value,parameter,mean_regret,std_regret,
/// and one <label>_<index>.csv regret curve per grid point, plus results.json.
Json run_sweep(const ExperimentConfig& config, const std::filesystem::path& out, unsigned threads);

/// JSON form of an analysis report; +inf is written as the string "inf".
Json analysis_to_json(const AnalysisReport& report);

/// Writes mu.json, mu_prime.json and lower_bound.json into `out`.
Json write_lower_bound(const LowerBoundConstruction& construction, std::uint64_t sigma_bar,
                       const std::filesystem::path& out);

}  // namespace risingts
