#include "risingts/catalog.hpp"
#include "risingts/experiment.hpp"
#include "risingts/instance_io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace risingts;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path() /
                   ("risingts_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(RISINGTS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

Json stationary_doc(std::uint64_t horizon = 200) {
  return Json::parse(R"({"horizon": )" + std::to_string(horizon) + R"(, "arms": [
    {"family": "constant", "params": {"value": 0.6}},
    {"family": "constant", "params": {"value": 0.5}, "law": "bernoulli"}]})");
}

Json run_config(const Json& instance) {
  Json c;
  c["instance"] = instance;
  c["runs"] = 3;
  c["seed"] = 5;
  c["stride"] = 20;
  c["policies"] = Json::array({{{"label", "ts"}, {"kind", "beta_swts"}},
                               {{"label", "gts"}, {"kind", "gamma_swgts"}, {"forced_exploration", 1}, {"window", 50}}});
  return c;
}

}  // namespace

TEST_CASE("instance documents round-trip") {
  std::vector<Arm> arms = {
      {RewardCurve::exponential(0.8, 0.05), RewardLaw::bernoulli()},
      {RewardCurve::polynomial(0.7, 3.0, 0.25), RewardLaw::bernoulli()},
      {RewardCurve::linear_capped(Rational(1, 7), Rational(2, 3), Rational(-1, 3)), RewardLaw::bernoulli()},
      {RewardCurve::constant(0.35), RewardLaw::bounded_uniform(0.1, SubgaussianProxy::Hoeffding)},
      {RewardCurve::tabulated({0.1, 0.2, 0.30000000000000004}), RewardLaw::bounded_uniform(0.05)},
  };
  const Instance inst(arms, 500);
  const Json doc = instance_to_json(inst);
  CHECK(doc["arms"][2]["params"]["slope"] == "1/7");
  CHECK(doc["arms"][2]["params"]["offset"] == "-1/3");
  CHECK(doc["arms"][3]["law_params"]["proxy"] == "hoeffding");
  const Instance back = instance_from_json(Json::parse(doc.dump()));
  CHECK(back == inst);
  CHECK(instance_hash(back) == instance_hash(inst));
  CHECK(instance_hash(inst).size() == 16);
  CHECK(instance_hash(inst) != instance_hash(inst.with_horizon(501)));

  const auto dir = scratch_dir("roundtrip");
  save_instance(dir / "i.json", inst);
  CHECK(load_instance(dir / "i.json") == inst);
  fs::remove_all(dir);
}

TEST_CASE("catalog instances round-trip") {
  for (const auto& inst : {catalog::fifteen_arm(300, 8), catalog::late_riser(1000), catalog::doubling_pair(50),
                           lower_bound_instances(5, 6, 40).mu_prime}) {
    CHECK(instance_from_json(Json::parse(instance_to_json(inst).dump())) == inst);
  }
}

TEST_CASE("instance schema errors") {
  auto expect_config_error = [](const std::string& text) {
    CAPTURE(text);
    CHECK_THROWS_AS(instance_from_json(Json::parse(text)), ConfigError);
  };
  expect_config_error(R"([])");
  expect_config_error(R"({"arms": [{"family": "constant", "params": {"value": 0.5}}]})");
  expect_config_error(R"({"horizon": 0, "arms": [{"family": "constant", "params": {"value": 0.5}}]})");
  expect_config_error(R"({"horizon": -4, "arms": [{"family": "constant", "params": {"value": 0.5}}]})");
  expect_config_error(R"({"horizon": 10, "arms": []})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5}}], "extra": 1})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "sigmoid", "params": {}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": "x"}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5, "c": 1}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "exponential", "params": {"c": 2, "a": 0.1}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "linear_capped", "params": {"slope": "1/0", "cap": "1", "offset": "0"}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "linear_capped", "params": {"slope": "a/2", "cap": "1", "offset": "0"}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5}, "law": "gauss"}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5}, "law": "bounded_uniform", "law_params": {"half_width": 0.9}}]})");
  expect_config_error(R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5}, "law": "bounded_uniform", "law_params": {"half_width": 0.1, "proxy": "loose"}}]})");
  // well-formed but not a valid bandit
  CHECK_THROWS_AS(instance_from_json(Json::parse(
                      R"({"horizon": 10, "arms": [{"family": "constant", "params": {"value": 0.5}}, {"family": "constant", "params": {"value": 0.5}}]})")),
                  InstanceError);
}

TEST_CASE("rational parsing") {
  CHECK(rational_from_json("3/6", "x") == Rational(1, 2));
  CHECK(rational_from_json("-2", "x") == Rational(-2));
  CHECK(rational_from_json(Json(0.25), "x") == Rational(1, 4));
  CHECK(rational_from_json(Json(7), "x") == Rational(7));
  CHECK(rational_to_string(Rational(4, 8)) == "1/2");
  CHECK(rational_to_string(Rational(3)) == "3");
  CHECK_THROWS_AS(rational_from_json(Json::array(), "x"), ConfigError);
}

TEST_CASE("experiment config parsing") {
  const auto config = parse_experiment_config(run_config(stationary_doc()));
  CHECK(config.runs == 3);
  CHECK(config.policies.size() == 2);
  CHECK(config.policies[1].config.window == std::uint64_t{50});
  CHECK(config.policies[1].config.kind == PolicyKind::GammaSWGTS);
  CHECK_FALSE(config.sweep.has_value());

  auto bad = [](Json c) { CHECK_THROWS_AS(parse_experiment_config(c), ConfigError); };
  Json c = run_config(stationary_doc());
  c["policies"][1]["label"] = "ts";
  bad(c);
  c = run_config(stationary_doc());
  c["policies"][0]["kind"] = "eps_greedy";
  bad(c);
  c = run_config(stationary_doc());
  c["policies"][0]["tau"] = 3;
  bad(c);
  c = run_config(stationary_doc());
  c["runs"] = 0;
  bad(c);
  c = run_config(stationary_doc());
  c["unknown"] = true;
  bad(c);
  c = run_config(stationary_doc());
  c["instance_file"] = "x.json";
  bad(c);
  c = run_config(stationary_doc());
  c["policies"] = Json::array();
  bad(c);
  c = run_config(stationary_doc());
  c["policies"][0]["label"] = "../escape";
  bad(c);
  c = run_config(stationary_doc());
  c["sweep"] = {{"axis", "forced_exploration"}, {"values", {0, 2.5}}};
  bad(c);
  c = run_config(stationary_doc());
  c["sweep"] = {{"axis", "tau"}, {"values", {0.5}}};
  bad(c);

  const auto dir = scratch_dir("config");
  save_instance(dir / "inst.json", instance_from_json(stationary_doc()));
  Json by_file = run_config(stationary_doc());
  by_file.erase("instance");
  by_file["instance_file"] = "inst.json";
  by_file["horizon"] = 120;
  write_json_file(dir / "cfg.json", by_file);
  const auto loaded = load_experiment_config(dir / "cfg.json");
  CHECK(build_instance(loaded).horizon() == 120);
  by_file["instance_file"] = "missing.json";
  write_json_file(dir / "cfg.json", by_file);
  CHECK_THROWS_AS(load_experiment_config(dir / "cfg.json"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("policy configs round-trip") {
  PolicyConfig p;
  p.kind = PolicyKind::SWUCB;
  p.window = 17;
  p.swucb_xi = 0.4;
  CHECK(policy_config_from_json(policy_config_to_json(p), "p") == p);
  PolicyConfig g;
  g.kind = PolicyKind::GammaSWGTS;
  g.precision = 0.5;
  g.forced_exploration = 3;
  CHECK(policy_config_from_json(Json::parse(policy_config_to_json(g).dump()), "p") == g);
}

TEST_CASE("aggregate csv layout") {
  Aggregate agg;
  agg.grid = {0, 5, 10};
  agg.mean_regret = {0.0, 1.0 / 3.0, 2.5};
  agg.std_regret = {0.0, 0.125, 1e-20};
  CHECK(aggregate_csv(agg) == "grid_t,mean_regret,std_regret\n0,0,0\n5,0.333333333333,0.125\n10,2.5,1e-20\n");
}

TEST_CASE("run writes one csv per policy and a results document") {
  const auto dir = scratch_dir("run");
  const auto config = parse_experiment_config(run_config(stationary_doc()));
  const Json results = run_experiment(config, dir / "a", 1);
  CHECK(fs::exists(dir / "a" / "ts.csv"));
  CHECK(fs::exists(dir / "a" / "gts.csv"));
  CHECK(count_lines(slurp(dir / "a" / "ts.csv")) == 200 / 20 + 1 + 1);
  const Json doc = read_json_file(dir / "a" / "results.json");
  CHECK(doc == results);
  CHECK(doc["version"] == kVersion);
  CHECK(doc["instance_hash"] == instance_hash(build_instance(config)));
  CHECK(doc["policies"][0]["master_seed"] == derive_seed(5, 0));
  CHECK(doc["policies"][1]["master_seed"] == derive_seed(5, 1));
  CHECK(doc["policies"][0]["mean_pull_counts"].size() == 2);
  CHECK(doc["policies"][0]["wald_violations"] == 0);
  CHECK_FALSE(doc.contains("threads"));

  run_experiment(config, dir / "b", 4);
  for (const char* f : {"ts.csv", "gts.csv", "results.json"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  fs::remove_all(dir);
}

TEST_CASE("a failing policy leaves no outputs") {
  const auto dir = scratch_dir("fail");
  Json c = run_config(stationary_doc());
  c["policies"][1]["window"] = 100000;
  const auto config = parse_experiment_config(c);
  CHECK_THROWS_AS(run_experiment(config, dir / "out", 1), ConfigError);
  CHECK((!fs::exists(dir / "out") || fs::is_empty(dir / "out")));
  fs::remove_all(dir);
}

TEST_CASE("sweep outputs") {
  const auto dir = scratch_dir("sweep");
  Json c = run_config(stationary_doc());
  c["policies"].erase(1);
  c["sweep"] = {{"axis", "window_exponent"}, {"values", {0.5, 1.0}}};
  const auto config = parse_experiment_config(c);
  const Json results = run_sweep(config, dir, 1);
  const std::string table = slurp(dir / "ts_sweep.csv");
  CHECK(table.rfind("axis_value,parameter,mean_regret,std_regret\n0.5,14,", 0) == 0);
  CHECK(count_lines(table) == 3);
  CHECK(fs::exists(dir / "ts_0.csv"));
  CHECK(fs::exists(dir / "ts_1.csv"));
  CHECK(results["axis"] == "window_exponent");
  CHECK(results["policies"][0]["points"][1]["parameter"] == 200);
  CHECK_THROWS_AS(run_sweep(parse_experiment_config(run_config(stationary_doc())), dir, 1), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("analysis document") {
  const auto inst = Instance({{RewardCurve::tabulated({0.0, 0.0, 0.0, 0.0, 0.9}), RewardLaw::bernoulli()},
                              {RewardCurve::constant(0.5), RewardLaw::bernoulli()}},
                             5);
  AnalysisRequest request;
  request.taus = {2, 5};
  request.bounds = BoundRequest{1, 0, BoundFlavor::Gauss};
  const Json doc = analysis_to_json(analyze(inst, request));
  CHECK(doc["optimal_arm"] == 1);
  CHECK(doc["sigma_mu"] == 1);
  CHECK(doc["windowed"][0]["tau"] == 2);
  CHECK(doc["windowed"][0]["sigma_prime"] == "inf");
  CHECK(doc["windowed"][0]["per_arm"][0]["delta_prime"].is_null());
  CHECK(doc["upsilon"].size() == 4);
  CHECK(doc["bounds"]["flavor"] == "gauss");
  CHECK(doc["bounds"]["per_arm"].size() == 1);
  CHECK(doc["bounds"]["per_arm"][0]["exploration"] == 0.0);
}

TEST_CASE("lower-bound files") {
  const auto dir = scratch_dir("lb");
  const auto lb = lower_bound_instances(15, 10, 100);
  const Json doc = write_lower_bound(lb, 10, dir);
  CHECK(doc["bound"] == 1.875);
  CHECK(doc["checks"]["gap_ok"] == true);
  CHECK(doc["checks"]["min_gap_mu"] == "193/800");
  CHECK(load_instance(dir / "mu.json") == lb.mu);
  CHECK(load_instance(dir / "mu_prime.json") == lb.mu_prime);
  CHECK(read_json_file(dir / "lower_bound.json") == doc);
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes and files") {
  const auto dir = scratch_dir("cli");
  write_json_file(dir / "stationary.json", stationary_doc());
  CHECK(cli("analyze --config " + (dir / "stationary.json").string() + " --tau-list 5,50 --out " + (dir / "an").string()) == 0);
  const Json analysis = read_json_file(dir / "an" / "analysis.json");
  CHECK(analysis["sigma_mu"] == 1);
  CHECK(analysis["windowed"].size() == 2);
  CHECK(cli("analyze --config " + (dir / "stationary.json").string() + " --bound-sigma 1 --bound-flavor gauss") == 0);
  CHECK(cli("analyze --config " + (dir / "stationary.json").string() + " --bound-sigma 500") == 2);
  CHECK(cli("analyze --config " + (dir / "stationary.json").string() + " --tau-list 5,x") == 2);

  Json broken = stationary_doc();
  broken["arms"][0]["params"]["slope"] = 1;
  write_json_file(dir / "broken.json", broken);
  CHECK(cli("analyze --config " + (dir / "broken.json").string()) == 2);
  Json tied = stationary_doc();
  tied["arms"][1]["params"]["value"] = 0.6;
  write_json_file(dir / "tied.json", tied);
  CHECK(cli("analyze --config " + (dir / "tied.json").string()) == 3);
  CHECK(cli("analyze --config " + (dir / "nope.json").string()) == 2);
  {
    std::ofstream garbage(dir / "garbage.json");
    garbage << "{not json";
  }
  CHECK(cli("analyze --config " + (dir / "garbage.json").string()) == 2);

  write_json_file(dir / "run.json", run_config(stationary_doc()));
  CHECK(cli("run --config " + (dir / "run.json").string() + " --out " + (dir / "r1").string()) == 0);
  CHECK(cli("run --config " + (dir / "run.json").string() + " --out " + (dir / "r2").string() +
            " --threads 8 --runs 3 --seed 5") == 0);
  for (const char* f : {"ts.csv", "gts.csv", "results.json"}) CHECK(slurp(dir / "r1" / f) == slurp(dir / "r2" / f));
  CHECK(cli("run --config " + (dir / "run.json").string() + " --out " + (dir / "r3").string() + " --stride 7") == 0);
  CHECK(count_lines(slurp(dir / "r3" / "ts.csv")) == 1 + 200 / 7 + 2);
  CHECK(cli("run --config " + (dir / "run.json").string() + " --out " + (dir / "r4").string() + " --seed 6") == 0);
  CHECK(slurp(dir / "r1" / "ts.csv") != slurp(dir / "r4" / "ts.csv"));
  CHECK(cli("run --config " + (dir / "run.json").string()) == 2);
  CHECK(cli("run --config " + (dir / "tied.json").string() + " --out " + (dir / "r5").string()) == 2);
  Json tied_run = run_config(tied);
  write_json_file(dir / "tied_run.json", tied_run);
  CHECK(cli("run --config " + (dir / "tied_run.json").string() + " --out " + (dir / "r6").string()) == 3);
  CHECK(cli("sweep --config " + (dir / "run.json").string() + " --out " + (dir / "s").string()) == 2);

  CHECK(cli("lower-bound -K 15 --sigma-bar 10 -T 100 --out " + (dir / "lb").string()) == 0);
  CHECK(read_json_file(dir / "lb" / "lower_bound.json")["bound"] == 1.875);
  CHECK(cli("analyze --config " + (dir / "lb" / "mu.json").string() + " --out " + (dir / "lba").string()) == 0);
  CHECK(read_json_file(dir / "lba" / "analysis.json")["sigma_mu"].get<std::uint64_t>() <= 22);
  CHECK(cli("lower-bound -K 3 --sigma-bar 2 -T 10 --out " + (dir / "lb2").string()) == 0);
  CHECK(read_json_file(dir / "lb2" / "lower_bound.json")["bound"] == 0.0);
  CHECK_NOTHROW(load_instance(dir / "lb2" / "mu_prime.json"));
  CHECK(cli("lower-bound -K 3 --sigma-bar 60 -T 100 --out " + (dir / "lb3").string()) == 2);

  CHECK(cli("verify --suite windows --out " + (dir / "v").string()) == 0);
  CHECK(read_json_file(dir / "v" / "verify.json")[0]["passed"] == true);
  CHECK(cli("verify --suite everything") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("--version") == 0);
  fs::remove_all(dir);
}
