#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ratecost/loop.hpp"
#include "ratecost/sde.hpp"

/// Experiment configuration: JSON schema, validation with line-precise
/// diagnostics, and a canonical echo.
namespace ratecost::harness {

using json = nlohmann::json;

enum class Mode { open_loop_ssa, open_loop_sde, closed_loop, bounds_only, fano_sweep, delta_convergence };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::open_loop_ssa: return "open-loop-ssa";
    case Mode::open_loop_sde: return "open-loop-sde";
    case Mode::closed_loop: return "closed-loop";
    case Mode::bounds_only: return "bounds-only";
    case Mode::fano_sweep: return "fano-sweep";
    case Mode::delta_convergence: return "delta-convergence";
  }
  return "unknown";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : {Mode::open_loop_ssa, Mode::open_loop_sde, Mode::closed_loop, Mode::bounds_only, Mode::fano_sweep,
                 Mode::delta_convergence})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

inline bool is_sweep(Mode m) { return m == Mode::fano_sweep || m == Mode::delta_convergence; }

/// Constant plant coefficients. `lambda` drives the open-loop modes; closed
/// loops compute lambda from the controller.
struct PlantSection {
  PlantKind kind = PlantKind::linear_gaussian;
  double mu = 1.0;
  double lambda = 0.0;
  double sigma2 = 1.0;
  /// Replace sigma2 by the Langevin intensity lambda + mu E[X] / gamma_x.
  bool langevin = false;
  double gamma_x = 1.0;
};

struct SimulationSection {
  double dt = 0.01;
  double horizon = 100.0;
  double burn_in = 0.0;  ///< resolved to 10 / mu when absent
  Integrator integrator = Integrator::exact;
  FeedbackMode feedback = FeedbackMode::deadbeat;
  std::size_t record_stride = 0;
  int quad_points = 9;
};

struct SweepSection {
  std::string parameter;
  std::vector<double> values;
  bool empty() const { return values.empty(); }
};

struct ExperimentConfig {
  Mode mode = Mode::closed_loop;
  ModelConfig model;
  /// x0 follows x_star and D unless given explicitly.
  bool x0_mean_set = false;
  bool x0_var_set = false;
  double mu_floor = 0.0;
  std::optional<ChannelConfig> channel;
  PlantSection plant;
  SimulationSection simulation;
  SweepSection sweep;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output_dir = "out";

  /// Sampling interval of the run: the channel's in closed loops, the integrator's otherwise.
  double delta() const {
    if ((mode == Mode::closed_loop || mode == Mode::fano_sweep) && channel) return channel->delta;
    return simulation.dt;
  }
  double capacity() const { return channel ? channel->capacity() : 0.0; }

  /// Noise intensity seen by the filter and the bounds.
  double plant_sigma2() const {
    if (!plant.langevin) return plant.sigma2;
    const bool closed = mode == Mode::closed_loop || mode == Mode::fano_sweep;
    const double mean_x = closed ? model.x_star : (plant.mu > 0.0 ? plant.lambda / plant.mu : 0.0);
    const double lambda = closed ? plant.mu * model.x_star : plant.lambda;
    return langevin_sigma2(lambda, plant.mu, mean_x, plant.gamma_x);
  }
};

inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"capacity", "power", "noise_intensity", "delta", "mu",
                                              "sigma2",   "lambda", "D",              "x_star", "gamma_x"};
  return names;
}

struct Diagnostic {
  std::string path;
  int line = 0;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  std::ostringstream out;
  out << "line " << d.line << ": " << (d.path.empty() ? "<root>" : d.path) << ": " << d.message;
  return out.str();
}

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diags)
      : std::runtime_error(diags.empty() ? "invalid config" : to_string(diags.front())), diags_(std::move(diags)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

namespace detail {

inline int line_at(std::string_view text, std::size_t pos) {
  pos = std::min(pos, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

/// Best-effort source line of a key path: each component is searched for after
/// the previous one. Missing trailing keys resolve to their parent's line.
inline int locate(std::string_view text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  bool found_any = false;
  for (const auto& key : path) {
    const std::string quoted = "\"" + key + "\"";
    const std::size_t hit = text.find(quoted, pos);
    if (hit == std::string_view::npos) break;
    pos = hit;
    found_any = true;
  }
  return found_any ? line_at(text, pos) : 1;
}

inline std::string join(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += '.';
    out += p;
  }
  return out;
}

class Reader {
 public:
  Reader(std::string_view text, std::vector<Diagnostic>& diags) : text_(text), diags_(diags) {}

  void error(const std::vector<std::string>& path, const std::string& message) {
    diags_.push_back({join(path), locate(text_, path), message});
  }

  void unknown_keys(const json& obj, const std::vector<std::string>& path, const std::vector<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        auto p = path;
        p.push_back(it.key());
        error(p, "unknown key");
      }
    }
  }

  const json* object(const json& parent, const std::vector<std::string>& path, const std::string& key) {
    auto p = path;
    p.push_back(key);
    if (!parent.contains(key)) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      error(p, "expected an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number(const json& obj, const std::vector<std::string>& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    auto p = path;
    p.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_number()) {
      error(p, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      error(p, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const json& obj, const std::vector<std::string>& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    auto p = path;
    p.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      error(p, "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<bool> boolean(const json& obj, const std::vector<std::string>& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    auto p = path;
    p.push_back(key);
    if (!obj.at(key).is_boolean()) {
      error(p, "expected true or false");
      return std::nullopt;
    }
    return obj.at(key).get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::vector<std::string>& path, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    auto p = path;
    p.push_back(key);
    if (!obj.at(key).is_string()) {
      error(p, "expected a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

 private:
  std::string_view text_;
  std::vector<Diagnostic>& diags_;
};

}  // namespace detail

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return config.has_value(); }
};

/// Parses and validates config text. Every violation is collected; the config
/// is returned only when there are none.
inline Validation validate_config(std::string_view text) {
  Validation out;
  auto& diags = out.diagnostics;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    diags.push_back({"", detail::line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what()});
    return out;
  }
  if (!root.is_object()) {
    diags.push_back({"", 1, "top level must be an object"});
    return out;
  }

  detail::Reader rd(text, diags);
  ExperimentConfig cfg;
  rd.unknown_keys(root,
                  {}, {"mode", "model", "plant", "channel", "simulation", "sweep", "replicas", "seed", "workers", "output_dir"});

  // mode
  if (auto m = rd.string(root, {}, "mode")) {
    if (auto parsed = parse_mode(*m))
      cfg.mode = *parsed;
    else
      rd.error({"mode"}, "unknown mode '" + *m +
                             "' (expected open-loop-ssa, open-loop-sde, closed-loop, bounds-only, fano-sweep or "
                             "delta-convergence)");
  } else if (!root.contains("mode")) {
    rd.error({"mode"}, "required");
  }
  const bool closed = cfg.mode == Mode::closed_loop || cfg.mode == Mode::fano_sweep;

  // model
  const json* model = rd.object(root, {}, "model");
  std::optional<double> x0_mean, x0_var;
  if (!model) {
    if (!root.contains("model")) rd.error({"model"}, "required");
  } else {
    const std::vector<std::string> p{"model"};
    rd.unknown_keys(*model, p, {"mu_max", "x_star", "D", "x0_mean", "x0_var", "allow_signed_lambda", "mu_floor"});
    if (auto v = rd.number(*model, p, "mu_max")) {
      cfg.model.mu_max = *v;
      if (!(*v > 0.0))
        rd.error({"model", "mu_max"},
                 "must be > 0 (uniform boundedness of the degradation rate: 0 <= mu(t) <= mu_max)");
    } else if (!model->contains("mu_max")) {
      rd.error({"model", "mu_max"},
               "required (uniform boundedness of the degradation rate: 0 <= mu(t) <= mu_max must be stated)");
    }
    if (auto v = rd.number(*model, p, "D")) {
      cfg.model.D = *v;
      if (!(*v > 0.0)) rd.error({"model", "D"}, "must be > 0 (variance constraint E[(X - x*)^2] <= D)");
    } else if (!model->contains("D")) {
      rd.error({"model", "D"}, "required (variance constraint E[(X - x*)^2] <= D)");
    }
    if (auto v = rd.number(*model, p, "x_star")) cfg.model.x_star = *v;
    x0_mean = rd.number(*model, p, "x0_mean");
    x0_var = rd.number(*model, p, "x0_var");
    if (x0_var && *x0_var < 0.0) rd.error({"model", "x0_var"}, "must be >= 0");
    if (auto v = rd.boolean(*model, p, "allow_signed_lambda")) cfg.model.allow_signed_lambda = *v;
    if (auto v = rd.number(*model, p, "mu_floor")) {
      cfg.mu_floor = *v;
      if (*v < 0.0) rd.error({"model", "mu_floor"}, "must be >= 0");
    }
  }
  cfg.x0_mean_set = x0_mean.has_value();
  cfg.x0_var_set = x0_var.has_value();
  cfg.model.x0_mean = x0_mean.value_or(cfg.model.x_star);
  cfg.model.x0_var = x0_var.value_or(cfg.model.D);

  // plant
  if (const json* plant = rd.object(root, {}, "plant")) {
    const std::vector<std::string> p{"plant"};
    rd.unknown_keys(*plant, p, {"kind", "mu", "lambda", "sigma2", "langevin", "gamma_x"});
    if (auto k = rd.string(*plant, p, "kind")) {
      if (*k == "linear-gaussian")
        cfg.plant.kind = PlantKind::linear_gaussian;
      else if (*k == "birth-death")
        cfg.plant.kind = PlantKind::birth_death;
      else
        rd.error({"plant", "kind"}, "unknown plant kind '" + *k + "' (expected linear-gaussian or birth-death)");
    }
    if (auto v = rd.number(*plant, p, "mu")) cfg.plant.mu = *v;
    if (auto v = rd.number(*plant, p, "lambda")) cfg.plant.lambda = *v;
    if (auto v = rd.number(*plant, p, "sigma2")) cfg.plant.sigma2 = *v;
    if (auto v = rd.boolean(*plant, p, "langevin")) cfg.plant.langevin = *v;
    if (auto v = rd.number(*plant, p, "gamma_x")) cfg.plant.gamma_x = *v;
  } else if (!root.contains("plant")) {
    rd.error({"plant"}, "required");
  }
  if (cfg.plant.mu < 0.0 || cfg.plant.mu > cfg.model.mu_max)
    rd.error({"plant", "mu"}, "must lie in [0, mu_max] (uniform boundedness of the degradation rate)");
  if (cfg.plant.mu < cfg.mu_floor) rd.error({"plant", "mu"}, "must be >= model.mu_floor");
  if (cfg.plant.lambda < 0.0 && !cfg.model.allow_signed_lambda)
    rd.error({"plant", "lambda"}, "must be >= 0 (production rates are nonnegative unless allow_signed_lambda is set)");
  if (cfg.plant.sigma2 < 0.0) rd.error({"plant", "sigma2"}, "must be >= 0 (noise intensity)");
  if (!(cfg.plant.gamma_x > 0.0)) rd.error({"plant", "gamma_x"}, "must be > 0 (degradation efficiency)");
  if (cfg.plant.kind == PlantKind::birth_death && cfg.mode == Mode::open_loop_sde)
    rd.error({"plant", "kind"}, "open-loop-sde simulates the linear-gaussian plant; use open-loop-ssa for birth-death");
  if (cfg.plant.kind == PlantKind::birth_death && closed && cfg.model.allow_signed_lambda)
    rd.error({"model", "allow_signed_lambda"}, "a birth-death plant cannot apply negative production rates");
  if (cfg.plant.langevin && closed && cfg.model.x_star < 0.0)
    rd.error({"model", "x_star"}, "Langevin intensity needs a nonnegative mean count");
  if (cfg.plant.langevin && !closed && !(cfg.plant.mu > 0.0))
    rd.error({"plant", "mu"}, "Langevin intensity needs mu > 0 to fix the mean count");

  // channel
  if (const json* ch = rd.object(root, {}, "channel")) {
    const std::vector<std::string> p{"channel"};
    rd.unknown_keys(*ch, p, {"power", "noise_intensity", "delta"});
    ChannelConfig c;
    if (auto v = rd.number(*ch, p, "power")) c.power = *v;
    if (auto v = rd.number(*ch, p, "noise_intensity")) c.noise_intensity = *v;
    if (auto v = rd.number(*ch, p, "delta")) c.delta = *v;
    if (c.power < 0.0) rd.error({"channel", "power"}, "must be >= 0 (channel power budget)");
    if (!(c.noise_intensity > 0.0)) rd.error({"channel", "noise_intensity"}, "must be > 0 (Wiener noise intensity)");
    if (!(c.delta > 0.0)) rd.error({"channel", "delta"}, "must be > 0 (sampling interval)");
    cfg.channel = c;
  } else if (closed && !root.contains("channel")) {
    rd.error({"channel"}, std::string("required in ") + to_string(cfg.mode) + " mode");
  }

  // simulation
  std::optional<double> burn_in;
  if (const json* sim = rd.object(root, {}, "simulation")) {
    const std::vector<std::string> p{"simulation"};
    rd.unknown_keys(*sim, p, {"dt", "horizon", "burn_in", "integrator", "feedback", "record_stride", "quad_points"});
    if (auto v = rd.number(*sim, p, "dt")) cfg.simulation.dt = *v;
    if (auto v = rd.number(*sim, p, "horizon")) cfg.simulation.horizon = *v;
    burn_in = rd.number(*sim, p, "burn_in");
    if (auto s = rd.string(*sim, p, "integrator")) {
      if (*s == "exact")
        cfg.simulation.integrator = Integrator::exact;
      else if (*s == "euler-maruyama")
        cfg.simulation.integrator = Integrator::euler_maruyama;
      else
        rd.error({"simulation", "integrator"}, "unknown integrator '" + *s + "' (expected exact or euler-maruyama)");
    }
    if (auto s = rd.string(*sim, p, "feedback")) {
      if (*s == "deadbeat")
        cfg.simulation.feedback = FeedbackMode::deadbeat;
      else if (*s == "proportional")
        cfg.simulation.feedback = FeedbackMode::proportional;
      else
        rd.error({"simulation", "feedback"}, "unknown feedback '" + *s + "' (expected deadbeat or proportional)");
    }
    if (auto v = rd.count(*sim, p, "record_stride")) cfg.simulation.record_stride = *v;
    if (auto v = rd.count(*sim, p, "quad_points")) {
      cfg.simulation.quad_points = static_cast<int>(std::min<std::uint64_t>(*v, 1u << 20));
      if (*v < 3) rd.error({"simulation", "quad_points"}, "must be >= 3");
    }
  }
  if (!(cfg.simulation.dt > 0.0)) rd.error({"simulation", "dt"}, "must be > 0");
  if (!(cfg.simulation.horizon > 0.0)) rd.error({"simulation", "horizon"}, "must be > 0");
  if (cfg.simulation.horizon < cfg.delta()) rd.error({"simulation", "horizon"}, "must be at least one sampling interval");
  const double default_burn = cfg.plant.mu > 0.0 ? 10.0 / cfg.plant.mu : 0.1 * cfg.simulation.horizon;
  cfg.simulation.burn_in = burn_in.value_or(std::min(default_burn, 0.5 * cfg.simulation.horizon));
  if (cfg.simulation.burn_in < 0.0 || cfg.simulation.burn_in >= cfg.simulation.horizon)
    rd.error({"simulation", "burn_in"}, "must lie in [0, horizon)");
  if (cfg.simulation.feedback == FeedbackMode::deadbeat && cfg.plant.kind == PlantKind::birth_death && closed)
    rd.error({"simulation", "feedback"},
             "deadbeat control needs impulsive, possibly negative rates; use proportional for a birth-death plant");

  // sweep
  if (const json* sw = rd.object(root, {}, "sweep")) {
    const std::vector<std::string> p{"sweep"};
    rd.unknown_keys(*sw, p, {"parameter", "values"});
    if (auto s = rd.string(*sw, p, "parameter")) {
      cfg.sweep.parameter = *s;
      const auto& names = sweep_parameters();
      if (std::find(names.begin(), names.end(), *s) == names.end())
        rd.error({"sweep", "parameter"}, "unknown sweep parameter '" + *s + "'");
    } else if (!sw->contains("parameter")) {
      rd.error({"sweep", "parameter"}, "required");
    }
    if (sw->contains("values")) {
      const json& vals = sw->at("values");
      if (!vals.is_array()) {
        rd.error({"sweep", "values"}, "expected an array of numbers");
      } else {
        for (const auto& v : vals) {
          if (!v.is_number() || !std::isfinite(v.get<double>())) {
            rd.error({"sweep", "values"}, "expected an array of finite numbers");
            break;
          }
          cfg.sweep.values.push_back(v.get<double>());
        }
      }
    }
    if (cfg.sweep.values.empty()) rd.error({"sweep", "values"}, "sweep grid must be nonempty");
  }
  if (cfg.mode == Mode::fano_sweep) {
    if (cfg.sweep.parameter.empty() && cfg.sweep.values.empty())
      rd.error({"sweep"}, "required in fano-sweep mode");
    else if (cfg.sweep.parameter != "capacity")
      rd.error({"sweep", "parameter"}, "fano-sweep sweeps capacity");
    for (double c : cfg.sweep.values)
      if (c < 0.0) rd.error({"sweep", "values"}, "capacities must be >= 0");
    if (!(cfg.model.x_star > 0.0)) rd.error({"model", "x_star"}, "fano-sweep needs a positive mean count");
  }
  if (cfg.mode == Mode::delta_convergence) {
    if (cfg.sweep.parameter.empty() && cfg.sweep.values.empty())
      rd.error({"sweep"}, "required in delta-convergence mode");
    else if (cfg.sweep.parameter != "delta")
      rd.error({"sweep", "parameter"}, "delta-convergence sweeps delta");
    for (double d : cfg.sweep.values)
      if (!(d > 0.0)) rd.error({"sweep", "values"}, "sampling intervals must be > 0");
  }
  if (cfg.sweep.parameter == "delta" || cfg.sweep.parameter == "D" || cfg.sweep.parameter == "noise_intensity")
    for (double d : cfg.sweep.values)
      if (!(d > 0.0)) {
        rd.error({"sweep", "values"}, cfg.sweep.parameter + " values must be > 0");
        break;
      }
  if ((cfg.sweep.parameter == "capacity" || cfg.sweep.parameter == "power") && !cfg.channel)
    rd.error({"channel"}, "sweeping " + cfg.sweep.parameter + " needs a channel section");

  // scalars
  if (auto v = rd.count(root, {}, "replicas")) {
    cfg.replicas = *v;
    if (*v < 1) rd.error({"replicas"}, "must be >= 1");
  }
  if (auto v = rd.count(root, {}, "seed")) cfg.seed = *v;
  if (auto v = rd.count(root, {}, "workers")) {
    cfg.workers = *v;
    if (*v < 1) rd.error({"workers"}, "must be >= 1");
  }
  if (auto s = rd.string(root, {}, "output_dir")) cfg.output_dir = *s;

  if (diags.empty()) {
    try {
      cfg.model.validate();
    } catch (const std::exception& e) {
      rd.error({"model"}, e.what());
    }
  }
  if (diags.empty()) out.config = std::move(cfg);
  return out;
}

inline ExperimentConfig parse_config(std::string_view text) {
  auto v = validate_config(text);
  if (!v.ok()) throw ConfigError(std::move(v.diagnostics));
  return std::move(*v.config);
}

/// Canonical form with every default resolved. Keys are sorted, so equal
/// configs serialize to equal bytes.
inline json to_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["model"] = {{"mu_max", cfg.model.mu_max},
                {"x_star", cfg.model.x_star},
                {"D", cfg.model.D},
                {"x0_mean", cfg.model.x0_mean},
                {"x0_var", cfg.model.x0_var},
                {"allow_signed_lambda", cfg.model.allow_signed_lambda},
                {"mu_floor", cfg.mu_floor}};
  j["plant"] = {{"kind", to_string(cfg.plant.kind)}, {"mu", cfg.plant.mu},         {"lambda", cfg.plant.lambda},
                {"sigma2", cfg.plant.sigma2},         {"langevin", cfg.plant.langevin}, {"gamma_x", cfg.plant.gamma_x}};
  if (cfg.channel)
    j["channel"] = {{"power", cfg.channel->power},
                    {"noise_intensity", cfg.channel->noise_intensity},
                    {"delta", cfg.channel->delta}};
  j["simulation"] = {{"dt", cfg.simulation.dt},
                     {"horizon", cfg.simulation.horizon},
                     {"burn_in", cfg.simulation.burn_in},
                     {"integrator", cfg.simulation.integrator == Integrator::exact ? "exact" : "euler-maruyama"},
                     {"feedback", to_string(cfg.simulation.feedback)},
                     {"record_stride", cfg.simulation.record_stride},
                     {"quad_points", cfg.simulation.quad_points}};
  if (!cfg.sweep.empty()) j["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", cfg.sweep.values}};
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["output_dir"] = cfg.output_dir;
  return j;
}

inline std::string echo(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

/// Copy of `cfg` with one sweep parameter set.
inline ExperimentConfig with_parameter(ExperimentConfig cfg, const std::string& name, double value) {
  if (name == "capacity") {
    cfg.channel->power = 2.0 * cfg.channel->noise_intensity * value;
  } else if (name == "power") {
    cfg.channel->power = value;
  } else if (name == "noise_intensity") {
    if (cfg.channel) cfg.channel->noise_intensity = value;
  } else if (name == "delta") {
    cfg.simulation.dt = value;
    if (cfg.channel) cfg.channel->delta = value;
  } else if (name == "mu") {
    cfg.plant.mu = value;
  } else if (name == "sigma2") {
    cfg.plant.sigma2 = value;
  } else if (name == "lambda") {
    cfg.plant.lambda = value;
  } else if (name == "D") {
    cfg.model.D = value;
    if (!cfg.x0_var_set) cfg.model.x0_var = value;
  } else if (name == "x_star") {
    cfg.model.x_star = value;
    if (!cfg.x0_mean_set) cfg.model.x0_mean = value;
  } else if (name == "gamma_x") {
    cfg.plant.gamma_x = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
  }
  cfg.sweep = {};
  return cfg;
}

}  // namespace ratecost::harness
