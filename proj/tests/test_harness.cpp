// Config validation, orchestration and artifacts.

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ratecost/harness/config.hpp"
#include "ratecost/harness/experiment.hpp"

using Catch::Approx;
using namespace ratecost;
using namespace ratecost::harness;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"({
  "mode": "closed-loop",
  "model": { "mu_max": 2.0, "D": 0.5, "allow_signed_lambda": true },
  "plant": { "mu": 0.5, "sigma2": 1.0 },
  "channel": { "power": 1.0, "noise_intensity": 1.0, "delta": 0.01 },
  "simulation": { "horizon": 20.0, "burn_in": 2.0 },
  "replicas": 3,
  "seed": 9
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ratecost_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const Diagnostic* find(const Validation& v, const std::string& path) {
  for (const auto& d : v.diagnostics)
    if (d.path == path) return &d;
  return nullptr;
}

}  // namespace

TEST_CASE("validate_config diagnostics", "[harness][config]") {
  SECTION("negative D cites the variance constraint with its line") {
    const std::string text = "{\n  \"mode\": \"closed-loop\",\n  \"model\": {\n    \"mu_max\": 1.0,\n    \"D\": -1\n  },\n"
                             "  \"plant\": {\"mu\": 0.5},\n  \"channel\": {\"power\": 1}\n}\n";
    const auto v = validate_config(text);
    REQUIRE_FALSE(v.ok());
    const auto* d = find(v, "model.D");
    REQUIRE(d != nullptr);
    CHECK(d->line == 5);
    CHECK_THAT(d->message, Catch::Matchers::ContainsSubstring("variance constraint"));
  }

  SECTION("missing mu_max cites uniform boundedness") {
    const std::string text = R"({"mode": "bounds-only", "model": {"D": 1.0}, "plant": {"mu": 0.5}})";
    const auto v = validate_config(text);
    REQUIRE_FALSE(v.ok());
    const auto* d = find(v, "model.mu_max");
    REQUIRE(d != nullptr);
    CHECK_THAT(d->message, Catch::Matchers::ContainsSubstring("uniform boundedness"));
  }

  SECTION("every violation is reported") {
    const std::string text = R"({"mode": "warp", "model": {"mu_max": 1, "D": 1, "colour": 3},
      "plant": {"mu": 5, "lambda": -1}, "replicas": 0})";
    const auto v = validate_config(text);
    CHECK(find(v, "mode"));
    CHECK(find(v, "model.colour"));
    CHECK(find(v, "plant.mu"));
    CHECK(find(v, "plant.lambda"));
    CHECK(find(v, "replicas"));
  }

  SECTION("malformed JSON reports its line") {
    const auto v = validate_config("{\n  \"mode\": \"closed-loop\",\n  \"model\": {\n}}\n,");
    REQUIRE(v.diagnostics.size() == 1);
    CHECK(v.diagnostics[0].line == 5);
  }

  SECTION("mode-specific requirements") {
    CHECK(find(validate_config(R"({"mode": "closed-loop", "model": {"mu_max": 1, "D": 1}, "plant": {}})"), "channel"));
    CHECK(find(validate_config(R"({"mode": "fano-sweep", "model": {"mu_max": 1, "D": 1, "x_star": 10},
                                 "plant": {}, "channel": {}, "sweep": {"parameter": "mu", "values": [1]}})"),
               "sweep.parameter"));
    CHECK(find(validate_config(R"({"mode": "delta-convergence", "model": {"mu_max": 1, "D": 1}, "plant": {},
                                 "sweep": {"parameter": "delta", "values": []}})"),
               "sweep.values"));
    CHECK(find(validate_config(R"({"mode": "closed-loop", "model": {"mu_max": 2, "D": 1, "x_star": 10},
                                 "plant": {"kind": "birth-death"}, "channel": {}})"),
               "simulation.feedback"));
  }
}

TEST_CASE("canonical echo round-trips", "[harness][config]") {
  const auto v = validate_config(kMinimal);
  REQUIRE(v.ok());
  const auto& cfg = *v.config;
  CHECK(cfg.model.x0_mean == 0.0);
  CHECK(cfg.model.x0_var == 0.5);
  CHECK(cfg.simulation.burn_in == 2.0);
  const std::string once = echo(cfg);
  CHECK(once == echo(parse_config(kMinimal)));
  CHECK(echo(parse_config(once)) == once);

  const auto defaults = parse_config(R"({"mode": "bounds-only", "model": {"mu_max": 1, "D": 1}, "plant": {"mu": 0.25},
                                         "simulation": {"horizon": 1000}})");
  CHECK(defaults.simulation.burn_in == Approx(40.0));
}

TEST_CASE("sweep parameters", "[harness][config]") {
  auto cfg = parse_config(kMinimal);
  CHECK(with_parameter(cfg, "capacity", 1.5).channel->power == Approx(3.0));
  const auto shifted = with_parameter(cfg, "x_star", 7.0);
  CHECK(shifted.model.x0_mean == 7.0);
  CHECK(with_parameter(cfg, "D", 2.0).model.x0_var == 2.0);
  CHECK(with_parameter(cfg, "delta", 0.1).channel->delta == 0.1);

  cfg.sweep = {"mu", {0.5, 3.0}};
  CHECK_THROWS_AS(expand_points(cfg), ConfigError);
}

TEST_CASE("bounds-only run", "[harness][run]") {
  const auto cfg = parse_config(slurp(fs::path(RATECOST_CONFIG_DIR) / "bounds_only.json"));
  const auto res = run_experiment(cfg);
  REQUIRE(res.points.size() == 1);
  CHECK(res.points[0].bounds.re_lower == Approx(0.5));
  CHECK(res.points[0].bounds.var_lower == Approx(0.5));

  const auto dir = scratch("bounds");
  write_artifacts(cfg, res, dir);
  const auto j = json::parse(slurp(dir / "point_000.json"));
  CHECK(j["bounds_report"]["re_lower"].get<double>() == Approx(0.5));
  for (const char* key : {"config", "achieved_var", "achieved_fano", "info_rate_nats", "bounds_report", "clamp_fraction",
                          "replica_count", "seed"})
    CHECK(j.contains(key));
  fs::remove_all(dir);
}

TEST_CASE("delta-convergence run", "[harness][run]") {
  const auto cfg = parse_config(slurp(fs::path(RATECOST_CONFIG_DIR) / "delta_convergence.json"));
  const auto res = run_experiment(cfg);
  REQUIRE(res.points.size() == 3);
  double prev = 1e300;
  for (const auto& p : res.points) {
    const double gap = std::abs(p.discrete.raw - p.continuous_raw);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(res.convergence_slope == Approx(1.0).margin(0.2));
}

TEST_CASE("runs are reproducible byte for byte", "[harness][determinism]") {
  auto cfg = parse_config(kMinimal);
  cfg.sweep = {"capacity", {0.0, 1.0}};
  auto render = [](const ExperimentResult& r) {
    std::ostringstream s;
    write_aggregate_csv(s, r);
    return s.str();
  };
  const std::string a = render(run_experiment(cfg));
  cfg.workers = 3;
  const std::string b = render(run_experiment(cfg));
  CHECK(a == b);
  cfg.seed = 10;
  CHECK(render(run_experiment(cfg)) != a);
}

TEST_CASE("divergence is recorded per point and sets the exit code", "[harness][run]") {
  auto cfg = parse_config(R"({"mode": "closed-loop", "model": {"mu_max": 1, "D": 1e-6, "allow_signed_lambda": true},
                              "plant": {"mu": 0.0, "sigma2": 1}, "channel": {"power": 1, "delta": 0.01},
                              "simulation": {"horizon": 50, "burn_in": 1},
                              "sweep": {"parameter": "power", "values": [0, 1e6]}})");
  const auto res = run_experiment(cfg);
  CHECK(res.points[0].diverged());
  CHECK_FALSE(res.points[1].diverged());
  CHECK(res.exit_code() == 2);
  const auto dir = scratch("diverge");
  write_artifacts(cfg, res, dir);
  CHECK(fs::exists(dir / "aggregate.csv"));
  CHECK(fs::exists(dir / "point_001.json"));
  fs::remove_all(dir);
}

TEST_CASE("open-loop modes", "[harness][run]") {
  SECTION("SSA") {
    auto cfg = parse_config(slurp(fs::path(RATECOST_CONFIG_DIR) / "open_loop_ssa.json"));
    cfg.simulation.horizon = 2000.0;
    const auto p = run_experiment(cfg).points.at(0);
    CHECK(p.achieved_fano == Approx(1.0).epsilon(0.08));
    CHECK(p.gamma_x == Approx(1.0).epsilon(0.02));
    CHECK(p.ell_x == Approx(1.0).epsilon(0.05));
    CHECK(p.info_rate == 0.0);
    CHECK_FALSE(p.sample_path.empty());
  }
  SECTION("SDE") {
    auto cfg = parse_config(slurp(fs::path(RATECOST_CONFIG_DIR) / "open_loop_sde.json"));
    const auto p = run_experiment(cfg).points.at(0);
    CHECK(p.mean_sigma2 == Approx(200.0));
    CHECK(p.achieved_mean == Approx(100.0).epsilon(0.01));
    CHECK(p.achieved_fano == Approx(1.0).epsilon(0.06));
  }
}

TEST_CASE("every shipped config respects the converse", "[harness][converse]") {
  for (const auto& entry : fs::directory_iterator(RATECOST_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().filename().string());
    const auto cfg = parse_config(slurp(entry.path()));
    const auto res = run_experiment(cfg);
    CHECK(res.exit_code() == 0);
    for (const auto& p : res.points) {
      INFO("point " << p.index << " var_margin " << p.var_margin << " rate_margin " << p.rate_margin);
      CHECK(p.converse_ok);
      if (std::isfinite(p.var_margin)) CHECK(p.var_margin >= -kConverseTolerance * p.bounds.var_lower);
    }
  }
}
