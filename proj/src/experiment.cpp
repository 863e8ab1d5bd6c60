#include "risingts/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace risingts {

namespace {

Json maybe_infinite(const MaybeInfinite& v) {
  if (v) return *v;
  return "inf";
}

Json real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

std::uint64_t positive_integer(const Json& v, const std::string& where, bool allow_zero = false) {
  const bool integral = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!integral || (!allow_zero && v.get<std::uint64_t>() == 0)) {
    throw ConfigError(where + (allow_zero ? ": expected a non-negative integer" : ": expected a positive integer"));
  }
  return v.get<std::uint64_t>();
}

double finite_number(const Json& v, const std::string& where) {
  if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(where + ": expected a finite number");
  return v.get<double>();
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// Writes every file or none of them.
void write_all(const std::filesystem::path& out, const std::vector<std::pair<std::string, std::string>>& files) {
  std::filesystem::create_directories(out);
  std::vector<std::filesystem::path> written;
  try {
    for (const auto& [name, content] : files) {
      const auto path = out / name;
      written.push_back(path);
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
      f << content;
      f.close();
      if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
    }
  } catch (...) {
    std::error_code ignored;
    for (const auto& p : written) std::filesystem::remove(p, ignored);
    throw;
  }
}

Json aggregate_summary(const Aggregate& agg) {
  const double final_mean = agg.mean_regret.back();
  const double final_std = agg.std_regret.back();
  return {{"runs", agg.runs},
          {"master_seed", agg.master_seed},
          {"mean_final_regret", final_mean},
          {"std_final_regret", final_std},
          {"final_regrets", agg.final_regrets},
          {"mean_pull_counts", agg.mean_counts},
          {"wald_violations", agg.wald_violations}};
}

Json base_results(const ExperimentConfig& config, const Instance& instance, std::uint64_t stride) {
  return {{"version", kVersion},
          {"instance_hash", instance_hash(instance)},
          {"instance", instance_to_json(instance)},
          {"horizon", instance.horizon()},
          {"runs", config.runs},
          {"seed", config.seed},
          {"stride", stride},
          {"std_convention", "population"}};
}

const char* axis_name(SweepAxis axis) {
  return axis == SweepAxis::WindowExponent ? "window_exponent" : "forced_exploration";
}

}  // namespace

Json policy_config_to_json(const PolicyConfig& c) {
  Json doc = {{"kind", std::string(policy_kind_name(c.kind))},
              {"forced_exploration", c.forced_exploration},
              {"ucb_alpha", c.ucb_alpha},
              {"swucb_xi", c.swucb_xi}};
  doc["window"] = c.window ? Json(*c.window) : Json(nullptr);
  doc["precision"] = c.precision ? Json(*c.precision) : Json(nullptr);
  return doc;
}

PolicyConfig policy_config_from_json(const Json& doc, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": expected an object");
  PolicyConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    const std::string at = where + "." + key;
    if (key == "label") continue;
    if (key == "kind") {
      if (!v.is_string()) throw ConfigError(at + ": expected a string");
      try {
        c.kind = parse_policy_kind(v.get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(at + ": " + e.what());
      }
    } else if (key == "forced_exploration") {
      c.forced_exploration = positive_integer(v, at, true);
    } else if (key == "window") {
      if (!v.is_null()) c.window = positive_integer(v, at);
    } else if (key == "precision") {
      if (!v.is_null()) c.precision = finite_number(v, at);
    } else if (key == "ucb_alpha") {
      c.ucb_alpha = finite_number(v, at);
    } else if (key == "swucb_xi") {
      c.swucb_xi = finite_number(v, at);
    } else {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
  if (!doc.contains("kind")) throw ConfigError(where + ": missing field 'kind'");
  return c;
}

ExperimentConfig parse_experiment_config(const Json& doc, const std::filesystem::path& base_dir) {
  const std::string root = "config";
  if (!doc.is_object()) throw ConfigError(root + ": expected an object");
  static const std::set<std::string> known = {"instance", "instance_file", "horizon", "runs",
                                              "seed",     "stride",        "policies", "sweep"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(root + ": unknown field '" + it.key() + "'");
  }

  ExperimentConfig c;
  const bool inline_instance = doc.contains("instance");
  if (inline_instance == doc.contains("instance_file")) {
    throw ConfigError(root + ": give exactly one of 'instance' and 'instance_file'");
  }
  if (inline_instance) {
    c.instance_doc = doc["instance"];
  } else {
    if (!doc["instance_file"].is_string()) throw ConfigError(root + ".instance_file: expected a path string");
    std::filesystem::path p = doc["instance_file"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    c.instance_doc = read_json_file(p);
  }
  if (doc.contains("horizon")) c.horizon = positive_integer(doc["horizon"], root + ".horizon");
  if (doc.contains("runs")) c.runs = positive_integer(doc["runs"], root + ".runs");
  if (doc.contains("seed")) c.seed = positive_integer(doc["seed"], root + ".seed", true);
  if (doc.contains("stride")) c.stride = positive_integer(doc["stride"], root + ".stride");

  if (!doc.contains("policies") || !doc["policies"].is_array() || doc["policies"].empty()) {
    throw ConfigError(root + ".policies: expected a non-empty array");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < doc["policies"].size(); ++i) {
    const Json& p = doc["policies"][i];
    const std::string where = root + ".policies[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("label") || !p["label"].is_string()) {
      throw ConfigError(where + ": expected an object with a string 'label'");
    }
    const auto label = p["label"].get<std::string>();
    if (label.empty() || label.find_first_of("/\\") != std::string::npos || label[0] == '.') {
      throw ConfigError(where + ".label: must be a plain file name");
    }
    if (!labels.insert(label).second) throw ConfigError(where + ".label: duplicate label '" + label + "'");
    c.policies.push_back({label, policy_config_from_json(p, where)});
  }

  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    const std::string where = root + ".sweep";
    if (!s.is_object() || !s.contains("axis") || !s.contains("values")) {
      throw ConfigError(where + ": expected {\"axis\", \"values\"}");
    }
    SweepSpec spec;
    if (s["axis"] == "window_exponent") {
      spec.axis = SweepAxis::WindowExponent;
    } else if (s["axis"] == "forced_exploration") {
      spec.axis = SweepAxis::ForcedExploration;
    } else {
      throw ConfigError(where + ".axis: expected \"window_exponent\" or \"forced_exploration\"");
    }
    if (!s["values"].is_array() || s["values"].empty()) throw ConfigError(where + ".values: expected a non-empty array");
    for (const auto& v : s["values"]) {
      const double x = finite_number(v, where + ".values");
      if (spec.axis == SweepAxis::ForcedExploration && (x < 0.0 || x != std::floor(x))) {
        throw ConfigError(where + ".values: forced exploration must be a non-negative integer");
      }
      spec.values.push_back(x);
    }
    c.sweep = std::move(spec);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_json_file(path), path.parent_path());
}

Instance build_instance(const ExperimentConfig& config) {
  Instance instance = instance_from_json(config.instance_doc);
  if (config.horizon && *config.horizon != instance.horizon()) return instance.with_horizon(*config.horizon);
  return instance;
}

std::string aggregate_csv(const Aggregate& aggregate) {
  std::string csv = "grid_t,mean_regret,std_regret\n";
  for (std::size_t g = 0; g < aggregate.grid.size(); ++g) {
    csv += std::to_string(aggregate.grid[g]) + "," + csv_number(aggregate.mean_regret[g]) + "," +
           csv_number(aggregate.std_regret[g]) + "\n";
  }
  return csv;
}

namespace {

// Configuration problems in a policy surface as invalid_argument from the library.
template <class F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out, unsigned threads) {
  const Instance instance = build_instance(config);
  const std::uint64_t stride = config.stride.value_or(default_stride(instance.horizon()));
  Json results = base_results(config, instance, stride);
  results["mode"] = "run";
  results["policies"] = Json::array();
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const auto& [label, policy] = config.policies[p];
    const std::uint64_t seed = derive_seed(config.seed, p);
    const Aggregate agg =
        as_config_error([&] { return run_batch(instance, policy, config.runs, seed, threads, stride); });
    files.emplace_back(label + ".csv", aggregate_csv(agg));
    Json entry = {{"label", label}, {"config", policy_config_to_json(policy)}, {"csv", label + ".csv"}};
    entry.update(aggregate_summary(agg));
    results["policies"].push_back(std::move(entry));
  }
  files.emplace_back("results.json", results.dump(2) + "\n");
  write_all(out, files);
  return results;
}

Json run_sweep(const ExperimentConfig& config, const std::filesystem::path& out, unsigned threads) {
  if (!config.sweep) throw ConfigError("config: the sweep command needs a 'sweep' section");
  const Instance instance = build_instance(config);
  const std::uint64_t stride = config.stride.value_or(default_stride(instance.horizon()));
  Json results = base_results(config, instance, stride);
  results["mode"] = "sweep";
  results["axis"] = axis_name(config.sweep->axis);
  results["values"] = config.sweep->values;
  results["policies"] = Json::array();
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const auto& [label, policy] = config.policies[p];
    const std::uint64_t seed = derive_seed(config.seed, p);
    const auto points = as_config_error([&] {
      return sweep(instance, policy, config.sweep->axis, config.sweep->values, config.runs, seed, threads, stride);
    });
    std::string table = "axis_value,parameter,mean_regret,std_regret\n";
    Json entry = {{"label", label}, {"config", policy_config_to_json(policy)}, {"csv", label + "_sweep.csv"}};
    entry["points"] = Json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& pt = points[k];
      const std::uint64_t parameter = config.sweep->axis == SweepAxis::WindowExponent
                                          ? pt.config.window.value_or(instance.horizon())
                                          : pt.config.forced_exploration;
      table += csv_number(pt.axis_value) + "," + std::to_string(parameter) + "," +
               csv_number(pt.aggregate.mean_regret.back()) + "," + csv_number(pt.aggregate.std_regret.back()) + "\n";
      const std::string curve = label + "_" + std::to_string(k) + ".csv";
      files.emplace_back(curve, aggregate_csv(pt.aggregate));
      Json point = {{"axis_value", pt.axis_value},
                    {"parameter", parameter},
                    {"seed", pt.seed},
                    {"config", policy_config_to_json(pt.config)},
                    {"csv", curve}};
      point.update(aggregate_summary(pt.aggregate));
      entry["points"].push_back(std::move(point));
    }
    files.emplace_back(label + "_sweep.csv", std::move(table));
    results["policies"].push_back(std::move(entry));
  }
  files.emplace_back("results.json", results.dump(2) + "\n");
  write_all(out, files);
  return results;
}

Json analysis_to_json(const AnalysisReport& report) {
  Json doc;
  doc["horizon"] = report.horizon;
  doc["optimal_arm"] = report.sigma.optimal_arm;
  doc["sigma_mu"] = report.sigma.sigma_mu;
  doc["sigma"] = Json::array();
  for (const auto& s : report.sigma.per_arm) doc["sigma"].push_back({{"arm", s.arm}, {"sigma", maybe_infinite(s.sigma)}});
  doc["windowed"] = Json::array();
  for (const auto& w : report.windowed) {
    Json entry = {{"tau", w.tau}, {"sigma_prime", maybe_infinite(w.sigma_prime)}, {"per_arm", Json::array()}};
    for (const auto& a : w.per_arm) {
      entry["per_arm"].push_back({{"arm", a.arm},
                                  {"sigma_prime", maybe_infinite(a.sigma_prime)},
                                  {"delta_prime", a.delta_prime ? real(*a.delta_prime) : Json(nullptr)}});
    }
    doc["windowed"].push_back(std::move(entry));
  }
  doc["upsilon"] = Json::array();
  for (const auto& u : report.upsilon) doc["upsilon"].push_back({{"M", u.horizon_m}, {"q", u.q}, {"value", real(u.value)}});
  doc["gaps"] = Json::array();
  for (const auto& g : report.gaps) {
    doc["gaps"].push_back({{"arm", g.arm},
                           {"n", g.n},
                           {"n_prime", g.n_prime},
                           {"expected", g.gap.expected},
                           {"averaged", g.gap.averaged}});
  }
  if (report.bound_request) {
    const auto& r = *report.bound_request;
    Json bounds = {{"sigma", r.sigma},
                   {"forced_exploration", r.forced_exploration},
                   {"flavor", r.flavor == BoundFlavor::Beta ? "beta" : "gauss"},
                   {"per_arm", Json::array()}};
    if (r.flavor == BoundFlavor::Beta) {
      bounds["epsilon"] = r.epsilon;
    } else {
      bounds["precision"] = r.gauss_precision;
    }
    for (const auto& t : report.bounds) {
      bounds["per_arm"].push_back({{"arm", t.arm},
                                   {"exploration", real(t.exploration)},
                                   {"stationary", real(t.stationary)},
                                   {"dissimilarity", real(t.dissimilarity)},
                                   {"dissimilarity_trivial", t.dissimilarity_trivial}});
    }
    doc["bounds"] = std::move(bounds);
  }
  return doc;
}

Json write_lower_bound(const LowerBoundConstruction& construction, std::uint64_t sigma_bar,
                       const std::filesystem::path& out) {
  const LowerBoundCheck check = check_lower_bound(construction, sigma_bar);
  Json doc = {{"arms", construction.mu.arms_count()},
              {"sigma_bar", sigma_bar},
              {"horizon", construction.mu.horizon()},
              {"bound", construction.bound},
              {"internal_sigma", rational_to_string(construction.internal_sigma)},
              {"boosted_arm", construction.boosted_arm},
              {"instances", {{"mu", "mu.json"}, {"mu_prime", "mu_prime.json"}}}};
  doc["checks"] = {{"min_gap_mu", rational_to_string(check.min_gap_mu)},
                   {"min_gap_mu_value", to_double(check.min_gap_mu)},
                   {"gap_mu_prime", rational_to_string(check.gap_mu_prime)},
                   {"gap_mu_prime_value", to_double(check.gap_mu_prime)},
                   {"gap_threshold_mu", "5/32"},
                   {"gap_threshold_mu_prime", "1/8"},
                   {"gap_ok", check.gap_ok},
                   {"gap_prime_ok", check.gap_prime_ok},
                   {"sigma_mu", check.sigma_mu},
                   {"sigma_mu_prime", check.sigma_mu_prime},
                   {"member", check.member},
                   {"member_relaxed", check.member_relaxed}};
  write_all(out, {{"mu.json", instance_to_json(construction.mu).dump(2) + "\n"},
                  {"mu_prime.json", instance_to_json(construction.mu_prime).dump(2) + "\n"},
                  {"lower_bound.json", doc.dump(2) + "\n"}});
  return doc;
}

}  // namespace risingts
