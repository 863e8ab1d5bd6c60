#include "risingts/analytics.hpp"
#include "risingts/experiment.hpp"
#include "risingts/lower_bound.hpp"
#include "risingts/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace risingts;

namespace {

enum Exit { kOk = 0, kViolation = 1, kConfig = 2, kInstance = 3 };

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item[0] == '-') throw ConfigError(std::string(flag) + ": '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

/// An instance document, or an experiment config that references one.
Instance load_any_instance(const std::string& path, std::optional<std::uint64_t> horizon) {
  const Json doc = read_json_file(path);
  if (doc.is_object() && (doc.contains("instance") || doc.contains("instance_file"))) {
    ExperimentConfig config = parse_experiment_config(doc, std::filesystem::path(path).parent_path());
    if (horizon) config.horizon = horizon;
    return build_instance(config);
  }
  Instance instance = instance_from_json(doc);
  return horizon ? instance.with_horizon(*horizon) : instance;
}

void emit(const Json& doc, const std::string& out, const char* name) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(out);
  write_json_file(std::filesystem::path(out) / name, doc);
}

struct Overrides {
  std::uint64_t seed = 0, runs = 0, stride = 0;
  unsigned threads = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* runs_opt = nullptr;
  CLI::Option* stride_opt = nullptr;

  void apply(ExperimentConfig& config) const {
    if (seed_opt->count()) config.seed = seed;
    if (runs_opt->count()) config.runs = runs;
    if (stride_opt->count()) config.stride = stride;
  }
};

void print_summary(const Json& results) {
  for (const auto& p : results["policies"]) {
    if (p.contains("points")) {
      for (const auto& pt : p["points"]) {
        std::printf("%-16s %s=%-10g final regret %.4f +- %.4f\n", p["label"].get<std::string>().c_str(),
                    results["axis"].get<std::string>().c_str(), pt["axis_value"].get<double>(),
                    pt["mean_final_regret"].get<double>(), pt["std_final_regret"].get<double>());
      }
    } else {
      std::printf("%-16s final regret %.4f +- %.4f\n", p["label"].get<std::string>().c_str(),
                  p["mean_final_regret"].get<double>(), p["std_final_regret"].get<double>());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson sampling for stochastic rising rested bandits"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Complexity indices, windowed gaps, growth index and bound terms");
  std::string analyze_config, analyze_out, tau_list, gap_list, flavor = "beta";
  std::uint64_t analyze_horizon = 0, upsilon_m = 0, bound_sigma = 0, bound_gamma = 0;
  double precision = 1.0, epsilon = 1.0;
  analyze_cmd->add_option("--config", analyze_config, "Instance file or experiment config")->required();
  analyze_cmd->add_option("--out", analyze_out, "Directory for analysis.json (stdout when omitted)");
  auto* analyze_horizon_opt = analyze_cmd->add_option("--horizon,-T", analyze_horizon, "Override the horizon");
  analyze_cmd->add_option("--tau-list", tau_list, "Comma-separated window lengths");
  auto* upsilon_m_opt = analyze_cmd->add_option("--upsilon-m", upsilon_m, "M for the growth index (default T)");
  analyze_cmd->add_option("--gap-points", gap_list, "Comma-separated n:n' pairs");
  auto* bound_sigma_opt = analyze_cmd->add_option("--bound-sigma", bound_sigma, "sigma for the bound terms");
  analyze_cmd->add_option("--bound-gamma", bound_gamma, "Forced exploration for the bound terms");
  analyze_cmd->add_option("--bound-flavor", flavor, "beta or gauss")->check(CLI::IsMember({"beta", "gauss"}));
  analyze_cmd->add_option("--bound-precision", precision, "Posterior precision (gauss)");
  analyze_cmd->add_option("--bound-epsilon", epsilon, "epsilon in (0, 1] (beta)");

  // run and sweep
  std::string run_config, run_out;
  Overrides run_over;
  auto add_experiment_flags = [](CLI::App* cmd, std::string& config, std::string& out, Overrides& o) {
    cmd->add_option("--config", config, "Experiment config")->required();
    cmd->add_option("--out", out, "Output directory")->required();
    o.seed_opt = cmd->add_option("--seed", o.seed, "Master seed override");
    o.runs_opt = cmd->add_option("--runs", o.runs, "Runs per policy override")->check(CLI::PositiveNumber);
    o.stride_opt = cmd->add_option("--stride", o.stride, "Regret grid stride override")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Simulate every policy in a config and write regret curves");
  add_experiment_flags(run, run_config, run_out, run_over);
  std::string sweep_config, sweep_out;
  Overrides sweep_over;
  auto* sweep_cmd = app.add_subcommand("sweep", "Regret as a function of tau = T^alpha or of Gamma");
  add_experiment_flags(sweep_cmd, sweep_config, sweep_out, sweep_over);

  // verify
  auto* verify = app.add_subcommand("verify", "Exhaustive numerical checks of the distributional inequalities");
  std::string suite = "all", verify_out;
  verify->add_option("--suite", suite, "lemmas, windows, identities or all")
      ->check(CLI::IsMember({"lemmas", "windows", "identities", "all"}));
  verify->add_option("--out", verify_out, "Directory for verify.json");

  // lower-bound
  auto* lower = app.add_subcommand("lower-bound", "Write the two lower-bound instances and the bound value");
  std::size_t arms = 0, boosted = 0;
  std::uint64_t sigma_bar = 0, lb_horizon = 0;
  std::string lb_out;
  lower->add_option("--arms,-K", arms, "Number of arms")->required();
  lower->add_option("--sigma-bar", sigma_bar, "Complexity budget")->required();
  lower->add_option("--horizon,-T", lb_horizon, "Horizon")->required();
  auto* boosted_opt = lower->add_option("--boosted-arm", boosted, "Arm raised in the alternative instance");
  lower->add_option("--out", lb_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*analyze_cmd) {
      const auto horizon = analyze_horizon_opt->count() ? std::optional(analyze_horizon) : std::nullopt;
      const Instance instance = load_any_instance(analyze_config, horizon);
      AnalysisRequest request;
      request.taus = parse_u64_list(tau_list, "--tau-list");
      if (upsilon_m_opt->count()) request.upsilon_m = upsilon_m;
      std::stringstream ss(gap_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("--gap-points: expected n:n' pairs");
        const auto n = parse_u64_list(item.substr(0, colon), "--gap-points");
        const auto np = parse_u64_list(item.substr(colon + 1), "--gap-points");
        if (n.size() != 1 || np.size() != 1) throw ConfigError("--gap-points: expected n:n' pairs");
        request.gap_points.emplace_back(n[0], np[0]);
      }
      if (bound_sigma_opt->count()) {
        BoundRequest b;
        b.sigma = bound_sigma;
        b.forced_exploration = bound_gamma;
        b.flavor = flavor == "gauss" ? BoundFlavor::Gauss : BoundFlavor::Beta;
        b.gauss_precision = precision;
        b.epsilon = epsilon;
        request.bounds = b;
      }
      emit(analysis_to_json(analyze(instance, request)), analyze_out, "analysis.json");
      return kOk;
    }

    if (*run || *sweep_cmd) {
      const bool is_run = static_cast<bool>(*run);
      const auto& over = is_run ? run_over : sweep_over;
      ExperimentConfig config = load_experiment_config(is_run ? run_config : sweep_config);
      over.apply(config);
      const Json results = is_run ? run_experiment(config, run_out, over.threads)
                                  : run_sweep(config, sweep_out, over.threads);
      print_summary(results);
      std::uint64_t wald = 0;
      for (const auto& p : results["policies"]) {
        if (p.contains("points")) {
          for (const auto& pt : p["points"]) wald += pt["wald_violations"].get<std::uint64_t>();
        } else {
          wald += p["wald_violations"].get<std::uint64_t>();
        }
      }
      if (wald != 0) {
        std::fprintf(stderr, "error: %llu runs broke the per-run regret decomposition\n",
                     static_cast<unsigned long long>(wald));
        return kViolation;
      }
      return kOk;
    }

    if (*verify) {
      const auto reports = verify_suite(suite);
      Json doc = Json::array();
      bool ok = true;
      for (const auto& r : reports) {
        Json checks = Json::array();
        for (const auto& c : r.checks) {
          std::printf("%-4s %-11s %-30s cases=%-8llu violations=%-4llu worst=%.3e (tol %.0e)\n",
                      c.violations ? "FAIL" : "ok", r.suite.c_str(), c.name.c_str(),
                      static_cast<unsigned long long>(c.cases), static_cast<unsigned long long>(c.violations),
                      c.worst_residual, c.tolerance);
          if (c.violations) std::printf("     worst case: %s\n", c.worst_case.c_str());
          checks.push_back({{"name", c.name},
                            {"cases", c.cases},
                            {"violations", c.violations},
                            {"worst_residual", c.worst_residual},
                            {"tolerance", c.tolerance},
                            {"worst_case", c.worst_case}});
        }
        ok = ok && r.passed();
        doc.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"checks", std::move(checks)}});
      }
      if (!verify_out.empty()) emit(doc, verify_out, "verify.json");
      return ok ? kOk : kViolation;
    }

    if (*lower) {
      const auto construction = lower_bound_instances(
          arms, sigma_bar, lb_horizon, boosted_opt->count() ? std::optional(boosted) : std::nullopt);
      const Json doc = write_lower_bound(construction, sigma_bar, lb_out);
      std::printf("bound %.6g  sigma_mu %llu / %llu\n", construction.bound,
                  static_cast<unsigned long long>(doc["checks"]["sigma_mu"].get<std::uint64_t>()),
                  static_cast<unsigned long long>(doc["checks"]["sigma_mu_prime"].get<std::uint64_t>()));
      const auto& c = doc["checks"];
      return c["gap_ok"] && c["gap_prime_ok"] && c["member_relaxed"] ? kOk : kViolation;
    }
  } catch (const InstanceError& e) {
    std::fprintf(stderr, "invalid instance: %s\n", e.what());
    return kInstance;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
