// ratecost: run experiments, evaluate bounds, validate configs.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ratecost/harness/config.hpp"
#include "ratecost/harness/experiment.hpp"

namespace {

using namespace ratecost;
using namespace ratecost::harness;

constexpr int kConfigError = 1;

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Loads and validates, printing diagnostics as `file:line: path: message`.
std::optional<ExperimentConfig> load(const std::string& path) {
  auto text = slurp(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    return std::nullopt;
  }
  auto v = validate_config(*text);
  for (const auto& d : v.diagnostics)
    std::cerr << path << ':' << d.line << ": " << (d.path.empty() ? "<root>" : d.path) << ": " << d.message << '\n';
  return v.config;
}

int cmd_validate(const std::string& path) {
  auto cfg = load(path);
  if (!cfg) return kConfigError;
  std::cout << echo(*cfg);
  return 0;
}

int cmd_bounds(const std::string& path) {
  auto cfg = load(path);
  if (!cfg) return kConfigError;
  try {
    json out = json::array();
    for (const auto& p : expand_points(*cfg)) {
      BoundsInput in;
      in.mean_sigma2 = p.plant_sigma2();
      in.mean_mu = p.plant.mu;
      in.D = p.model.D;
      in.capacity = p.capacity();
      in.gamma_x = p.plant.gamma_x;
      if (p.plant.mu > 0.0) in.ell_x = 1.0 / p.plant.mu;
      json j = to_json(evaluate_bounds(in));
      j["capacity"] = in.capacity;
      j["mean_sigma2"] = in.mean_sigma2;
      j["mean_mu"] = in.mean_mu;
      j["D"] = in.D;
      out.push_back(j);
    }
    std::cout << (out.size() == 1 ? out.front() : out).dump(2) << '\n';
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << path << ": " << d.path << ": " << d.message << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out_dir,
            std::optional<std::size_t> workers) {
  auto cfg = load(path);
  if (!cfg) return kConfigError;
  if (seed) cfg->seed = *seed;
  if (out_dir) cfg->output_dir = *out_dir;
  if (workers) cfg->workers = std::max<std::size_t>(1, *workers);

  ExperimentResult res;
  try {
    res = run_experiment(*cfg);
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << path << ": " << d.path << ": " << d.message << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfigError;
  }
  write_artifacts(*cfg, res, cfg->output_dir);

  for (const auto& note : res.notes) std::cerr << "note: " << note << '\n';
  std::cout << to_string(cfg->mode) << ": " << res.points.size() << " point(s) written to " << cfg->output_dir << '\n';
  if (std::isfinite(res.convergence_slope)) std::cout << "convergence slope " << res.convergence_slope << '\n';
  return res.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-cost experiments for controlled birth-death and Ornstein-Uhlenbeck plants"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;

  auto* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--workers", workers, "Worker threads");

  auto* bounds = app.add_subcommand("bounds", "Print the converse bounds for a config");
  bounds->add_option("config", config, "Experiment config (JSON)")->required();

  auto* validate = app.add_subcommand("validate", "Check a config and echo its canonical form");
  validate->add_option("config", config, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*run) return cmd_run(config, seed, out_dir, workers);
  if (*bounds) return cmd_bounds(config);
  return cmd_validate(config);
}
