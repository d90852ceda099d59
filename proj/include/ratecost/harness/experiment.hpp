#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ratecost/birthdeath.hpp"
#include "ratecost/bounds.hpp"
#include "ratecost/harness/config.hpp"
#include "ratecost/loop.hpp"
#include "ratecost/parallel.hpp"
#include "ratecost/random.hpp"
#include "ratecost/sde.hpp"
#include "ratecost/trajectory.hpp"

namespace ratecost::harness {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Relative slack allowed on converse checks for Monte Carlo estimates.
inline constexpr double kConverseTolerance = 0.03;

struct PointResult {
  std::size_t index = 0;
  std::string parameter;
  double value = kNaN;
  ExperimentConfig config;  ///< effective config of this point

  double delta = kNaN;
  double capacity = 0.0;
  double mean_mu = kNaN;
  double mean_lambda = kNaN;
  double mean_sigma2 = kNaN;

  double achieved_mean = kNaN;
  double achieved_var = kNaN;
  double achieved_fano = kNaN;
  double info_rate = kNaN;
  double gamma_x = kNaN;
  double ell_x = kNaN;
  double mean_power = kNaN;
  double error_estimate_correlation = kNaN;
  double clamp_fraction = 0.0;

  BoundsReport bounds;
  DiscreteRateBound discrete;
  double continuous_raw = kNaN;  ///< unclamped continuous bound at the config D

  double var_margin = kNaN;   ///< achieved_var - var_lower
  double rate_margin = kNaN;  ///< info_rate - rd_lower_continuous(achieved_var)
  double fano_margin = kNaN;  ///< achieved_fano - fano_lower
  bool converse_ok = true;

  std::size_t replicas = 0;
  std::size_t diverged_replicas = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
  Trajectory sample_path;

  bool diverged() const { return diverged_replicas > 0; }
};

struct ExperimentResult {
  Mode mode = Mode::closed_loop;
  std::vector<PointResult> points;
  double convergence_slope = kNaN;  ///< delta-convergence only
  std::vector<std::string> notes;

  bool diverged() const {
    for (const auto& p : points)
      if (p.diverged()) return true;
    return false;
  }
  int exit_code() const { return diverged() ? 2 : 0; }
};

namespace detail {

inline bool closed_mode(Mode m) { return m == Mode::closed_loop || m == Mode::fano_sweep; }

/// Seed of sweep point i, decorrelated from the master seed.
inline std::uint64_t point_seed(std::uint64_t master, std::size_t point) {
  return RandomStream::derive(master, point).engine()();
}

inline void check_point(const ExperimentConfig& cfg) {
  std::vector<Diagnostic> diags;
  auto fail = [&](std::string path, std::string msg) { diags.push_back({std::move(path), 0, std::move(msg)}); };
  try {
    cfg.model.validate();
  } catch (const std::exception& e) {
    fail("model", e.what());
  }
  if (cfg.plant.mu < cfg.mu_floor || cfg.plant.mu > cfg.model.mu_max)
    fail("plant.mu", "must lie in [mu_floor, mu_max] (uniform boundedness of the degradation rate)");
  if (cfg.plant.lambda < 0.0 && !cfg.model.allow_signed_lambda)
    fail("plant.lambda", "must be >= 0 (production rates are nonnegative unless allow_signed_lambda is set)");
  if (cfg.plant.sigma2 < 0.0) fail("plant.sigma2", "must be >= 0");
  if (!(cfg.plant.gamma_x > 0.0)) fail("plant.gamma_x", "must be > 0");
  if (cfg.channel) {
    try {
      cfg.channel->validate();
    } catch (const std::exception& e) {
      fail("channel", e.what());
    }
  }
  if (cfg.simulation.horizon < cfg.delta()) fail("simulation.horizon", "must be at least one sampling interval");
  if (!diags.empty()) throw ConfigError(std::move(diags));
}

inline BoundsInput bounds_input(const ExperimentConfig& cfg, double mean_sigma2, double mean_mu) {
  BoundsInput in;
  in.mean_sigma2 = mean_sigma2;
  in.mean_mu = mean_mu;
  in.D = cfg.model.D;
  in.capacity = cfg.capacity();
  in.gamma_x = cfg.plant.gamma_x;
  return in;
}

inline void finish_margins(PointResult& r) {
  if (std::isfinite(r.achieved_var) && std::isfinite(r.bounds.var_lower)) {
    r.var_margin = r.achieved_var - r.bounds.var_lower;
    if (r.var_margin < -kConverseTolerance * r.bounds.var_lower) r.converse_ok = false;
  }
  if (std::isfinite(r.info_rate) && r.achieved_var > 0.0 && std::isfinite(r.mean_sigma2)) {
    const double need = rd_lower_continuous(r.mean_sigma2, r.mean_mu, r.achieved_var).value;
    r.rate_margin = r.info_rate - need;
    // Slack of 3% on the variance side: E[sigma^2] / (2 D) scales with 1/D.
    if (r.rate_margin < -kConverseTolerance * r.mean_sigma2 / (2.0 * r.achieved_var)) r.converse_ok = false;
  }
  if (std::isfinite(r.achieved_fano) && std::isfinite(r.bounds.fano_lower)) {
    r.fano_margin = r.achieved_fano - r.bounds.fano_lower;
    if (r.fano_margin < -kConverseTolerance * r.bounds.fano_lower) r.converse_ok = false;
  }
}

inline DiscreteRateBound constant_discrete_bound(const ExperimentConfig& cfg, double sigma2, double delta) {
  const double mu = cfg.plant.mu;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(cfg.simulation.horizon / delta)));
  const Path mu_path = [mu](double) { return mu; };
  const Path lambda_path = [&cfg](double) { return cfg.plant.lambda; };
  const Path sigma_path = [sigma2](double) { return sigma2; };
  const DiscreteStep step = exact_discretize(mu_path, lambda_path, sigma_path, 0.0, delta, cfg.simulation.quad_points);
  DiscreteRateAccumulator acc(cfg.model.D, delta, steps);
  for (std::size_t k = 0; k < steps; ++k) acc.add(step.A, step.sigma2);
  const std::vector<DiscreteRateAccumulator> one{acc};
  return combine(one);
}

// Per-replica summaries of the open-loop modes.
struct SdeReplica {
  RunningMoments x;
  ControlMoments controls;
  Trajectory trajectory;
};

struct SsaReplica {
  RunningMoments x;
  BioStats bio;
  Trajectory trajectory;
};

}  // namespace detail

inline std::vector<ExperimentConfig> expand_points(const ExperimentConfig& cfg) {
  std::vector<ExperimentConfig> pts;
  if (cfg.sweep.empty()) {
    pts.push_back(cfg);
  } else {
    for (double v : cfg.sweep.values) pts.push_back(with_parameter(cfg, cfg.sweep.parameter, v));
  }
  for (const auto& p : pts) detail::check_point(p);
  return pts;
}

/**
 * Runs every (sweep point, replica) job on `cfg.workers` threads and merges
 * the results per point in replica order. A diverged closed-loop replica is
 * recorded on its point; the sweep continues.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto points = expand_points(cfg);
  const std::size_t n = points.size();
  const std::size_t reps = cfg.replicas;

  ExperimentResult out;
  out.mode = cfg.mode;
  out.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = out.points[i];
    r.index = i;
    r.parameter = cfg.sweep.parameter;
    r.value = cfg.sweep.empty() ? kNaN : cfg.sweep.values[i];
    r.config = points[i];
    r.delta = points[i].delta();
    r.capacity = points[i].capacity();
    r.seed = detail::point_seed(cfg.seed, i);
  }

  switch (cfg.mode) {
    case Mode::bounds_only: {
      for (auto& r : out.points) {
        const auto& p = r.config;
        r.mean_mu = p.plant.mu;
        r.mean_sigma2 = p.plant_sigma2();
        auto in = detail::bounds_input(p, r.mean_sigma2, r.mean_mu);
        if (p.plant.mu > 0.0) in.ell_x = 1.0 / p.plant.mu;
        r.bounds = evaluate_bounds(in);
        r.continuous_raw = rd_lower_continuous(r.mean_sigma2, r.mean_mu, p.model.D).raw;
        r.discrete = detail::constant_discrete_bound(p, r.mean_sigma2, p.delta());
        r.replicas = 0;
      }
      break;
    }

    case Mode::delta_convergence: {
      std::vector<double> xs, ys;
      for (auto& r : out.points) {
        const auto& p = r.config;
        r.mean_mu = p.plant.mu;
        r.mean_sigma2 = p.plant_sigma2();
        r.bounds = evaluate_bounds(detail::bounds_input(p, r.mean_sigma2, r.mean_mu));
        r.continuous_raw = rd_lower_continuous(r.mean_sigma2, r.mean_mu, p.model.D).raw;
        r.discrete = detail::constant_discrete_bound(p, r.mean_sigma2, p.simulation.dt);
        const double gap = std::abs(r.discrete.raw - r.continuous_raw);
        if (gap > 0.0) {
          xs.push_back(std::log(p.simulation.dt));
          ys.push_back(std::log(gap));
        }
        r.replicas = 0;
      }
      if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
        out.convergence_slope = sxy / sxx;
      }
      break;
    }

    case Mode::closed_loop:
    case Mode::fano_sweep: {
      std::vector<ReplicaResult> parts(n * reps);
      parallel_for(n * reps, cfg.workers, [&](std::size_t job) {
        const std::size_t i = job / reps, k = job % reps;
        const auto& p = points[i];
        LoopOptions opt;
        opt.horizon = p.simulation.horizon;
        opt.burn_in = p.simulation.burn_in;
        opt.feedback = p.simulation.feedback;
        opt.record_stride = k == 0 ? p.simulation.record_stride : 0;
        opt.mu_floor = p.mu_floor;
        const PlantConfig plant{p.plant.kind, p.plant_sigma2()};
        try {
          parts[job] = run_loop_replica(p.model, *p.channel, plant, constant_mu(p.plant.mu), opt, out.points[i].seed, k);
        } catch (const NumericalDivergence& e) {
          ReplicaResult failed;
          failed.diverged = true;
          failed.divergence_note = e.what();
          failed.trajectory.stream = k;
          parts[job] = std::move(failed);
        }
      });
      for (std::size_t i = 0; i < n; ++i) {
        auto& r = out.points[i];
        const auto& p = points[i];
        std::vector<ReplicaResult> mine(std::make_move_iterator(parts.begin() + static_cast<std::ptrdiff_t>(i * reps)),
                                        std::make_move_iterator(parts.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps)));
        const PlantConfig plant{p.plant.kind, p.plant_sigma2()};
        auto run = merge_replicas(mine, p.model, *p.channel, plant, r.seed);
        r.replicas = run.replicas;
        r.diverged_replicas = run.diverged_replicas;
        r.notes = run.notes;
        r.achieved_mean = run.achieved_mean;
        r.achieved_var = run.achieved_var;
        r.achieved_fano = run.achieved_fano;
        r.mean_mu = run.mean_mu;
        r.mean_lambda = run.mean_lambda;
        r.mean_sigma2 = run.mean_sigma2;
        r.gamma_x = run.gamma_x;
        r.ell_x = run.ell_x;
        r.mean_power = run.mean_power;
        r.error_estimate_correlation = run.error_estimate_correlation;
        r.clamp_fraction = run.clamp_fraction;
        r.bounds = run.bounds;
        r.discrete = run.discrete_bound;
        r.continuous_raw = rd_lower_continuous(r.mean_sigma2, r.mean_mu, p.model.D).raw;
        if (p.plant.kind == PlantKind::linear_gaussian) {
          r.info_rate = directed_info_rate(run);
        } else {
          r.notes.push_back("information rate is not computed for a birth-death plant");
        }
        if (!(p.model.x_star > 0.0)) {
          // Copy-number statistics need a positive target mean.
          r.achieved_fano = r.gamma_x = r.ell_x = kNaN;
          r.bounds.fano_lower = r.bounds.fano_awgn = kNaN;
        }
        if (!run.trajectories.empty()) r.sample_path = std::move(run.trajectories.front());
      }
      break;
    }

    case Mode::open_loop_sde: {
      std::vector<detail::SdeReplica> parts(n * reps);
      parallel_for(n * reps, cfg.workers, [&](std::size_t job) {
        const std::size_t i = job / reps, k = job % reps;
        const auto& p = points[i];
        SimulationOptions opt{p.simulation.dt, p.simulation.horizon, p.simulation.integrator, 1};
        RandomStream rng = RandomStream::derive(out.points[i].seed, k);
        const ControlSample u{p.plant.mu, p.plant.lambda, p.plant_sigma2()};
        auto run = simulate_sde(p.model, constant_policy(u), opt, rng, out.points[i].seed, k);
        auto& slot = parts[job];
        accumulate_window(run.trajectory, p.simulation.burn_in, slot.x);
        slot.controls = run.controls;
        if (k == 0 && p.simulation.record_stride > 0) {
          Trajectory thin;
          thin.kind = run.trajectory.kind;
          thin.seed = run.trajectory.seed;
          thin.stream = k;
          for (std::size_t j = 0; j < run.trajectory.size(); j += p.simulation.record_stride)
            thin.push(run.trajectory.times[j], run.trajectory.values[j]);
          slot.trajectory = std::move(thin);
        }
      });
      for (std::size_t i = 0; i < n; ++i) {
        auto& r = out.points[i];
        const auto& p = points[i];
        RunningMoments x;
        double mu = 0, lambda = 0, s2 = 0;
        for (std::size_t k = 0; k < reps; ++k) {
          auto& part = parts[i * reps + k];
          x.merge(part.x);
          mu += part.controls.mean_mu / static_cast<double>(reps);
          lambda += part.controls.mean_lambda / static_cast<double>(reps);
          s2 += part.controls.mean_sigma2 / static_cast<double>(reps);
        }
        r.replicas = reps;
        r.achieved_mean = x.mean();
        r.achieved_var = x.variance();
        if (r.achieved_mean > 0.0) r.achieved_fano = r.achieved_var / r.achieved_mean;
        r.mean_mu = mu;
        r.mean_lambda = lambda;
        r.mean_sigma2 = s2;
        r.info_rate = 0.0;
        if (lambda > 0.0 && r.achieved_mean > 0.0) r.ell_x = r.achieved_mean / lambda;
        r.gamma_x = 1.0;  // mu is constant
        auto in = detail::bounds_input(p, s2, mu);
        in.capacity = 0.0;
        in.ell_x = r.ell_x;
        in.gamma_x = 1.0;
        r.capacity = 0.0;
        r.bounds = evaluate_bounds(in);
        r.continuous_raw = rd_lower_continuous(s2, mu, p.model.D).raw;
        r.discrete = detail::constant_discrete_bound(p, s2, p.simulation.dt);
        r.sample_path = std::move(parts[i * reps].trajectory);
      }
      break;
    }

    case Mode::open_loop_ssa: {
      std::vector<detail::SsaReplica> parts(n * reps);
      parallel_for(n * reps, cfg.workers, [&](std::size_t job) {
        const std::size_t i = job / reps, k = job % reps;
        const auto& p = points[i];
        RandomStream rng = RandomStream::derive(out.points[i].seed, k);
        const auto x0 = static_cast<std::int64_t>(std::llround(std::max(0.0, p.model.x0_mean)));
        auto run = simulate_ssa(constant_rates({p.plant.lambda, p.plant.mu}), x0, p.simulation.dt,
                                p.simulation.horizon, rng, out.points[i].seed, k);
        auto& slot = parts[job];
        accumulate_window(run.trajectory, p.simulation.burn_in, slot.x);
        slot.bio = bio_stats(run.trajectory, run.controls, p.simulation.burn_in);
        if (k == 0 && p.simulation.record_stride > 0) slot.trajectory = std::move(run.trajectory);
      });
      for (std::size_t i = 0; i < n; ++i) {
        auto& r = out.points[i];
        const auto& p = points[i];
        RunningMoments x;
        double mu = 0, lambda = 0, mu_x = 0;
        for (std::size_t k = 0; k < reps; ++k) {
          auto& part = parts[i * reps + k];
          x.merge(part.x);
          mu += part.bio.mean_mu / static_cast<double>(reps);
          lambda += part.bio.mean_lambda / static_cast<double>(reps);
          mu_x += part.bio.mean_mu_x / static_cast<double>(reps);
          if (part.bio.lifetime_mismatch)
            r.notes.push_back("replica " + std::to_string(k) + ": Little's-law lifetime differs from 1/E[mu]");
        }
        r.replicas = reps;
        r.achieved_mean = x.mean();
        r.achieved_var = x.variance();
        r.achieved_fano = r.achieved_mean > 0.0 ? r.achieved_var / r.achieved_mean : kNaN;
        r.mean_mu = mu;
        r.mean_lambda = lambda;
        r.gamma_x = mu_x > 0.0 ? r.achieved_mean * mu / mu_x : kNaN;
        r.ell_x = lambda > 0.0 ? r.achieved_mean / lambda : kNaN;
        r.info_rate = 0.0;
        r.capacity = 0.0;
        const double gamma = std::isfinite(r.gamma_x) && r.gamma_x > 0.0 ? r.gamma_x : 1.0;
        r.mean_sigma2 = langevin_sigma2(lambda, mu, r.achieved_mean, gamma);
        auto in = detail::bounds_input(p, r.mean_sigma2, mu);
        in.capacity = 0.0;
        in.ell_x = r.ell_x;
        in.gamma_x = gamma;
        r.bounds = evaluate_bounds(in);
        r.continuous_raw = rd_lower_continuous(r.mean_sigma2, mu, p.model.D).raw;
        r.sample_path = std::move(parts[i * reps].trajectory);
      }
      break;
    }
  }

  for (auto& r : out.points) {
    if (r.replicas > 0) detail::finish_margins(r);
    for (const auto& note : r.notes) out.notes.push_back("point " + std::to_string(r.index) + ": " + note);
  }
  return out;
}

// --- artifacts ------------------------------------------------------------------

inline json to_json(const BoundsReport& b) {
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"re_lower", num(b.re_lower)},     {"var_lower", num(b.var_lower)},
          {"fano_lower", num(b.fano_lower)}, {"fano_awgn", num(b.fano_awgn)},
          {"achievable", b.achievable},      {"achievable_literal", b.achievable_literal},
          {"clamped", b.clamped}};
}

inline json to_json(const PointResult& r) {
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["config"] = to_json(r.config);
  j["achieved_var"] = num(r.achieved_var);
  j["achieved_fano"] = num(r.achieved_fano);
  j["info_rate_nats"] = num(r.info_rate);
  j["bounds_report"] = to_json(r.bounds);
  j["clamp_fraction"] = r.clamp_fraction;
  j["replica_count"] = r.replicas;
  j["seed"] = r.seed;
  j["achieved_mean"] = num(r.achieved_mean);
  j["rd_lower_discrete"] = {{"rate", num(r.discrete.rate)},
                            {"raw", num(r.discrete.raw)},
                            {"ess_ratio", num(r.discrete.ess_ratio)},
                            {"achievable", r.discrete.achievable}};
  j["margins"] = {{"var", num(r.var_margin)}, {"rate", num(r.rate_margin)}, {"fano", num(r.fano_margin)}};
  j["converse_ok"] = r.converse_ok;
  j["diverged_replicas"] = r.diverged_replicas;
  j["notes"] = r.notes;
  return j;
}

inline const std::vector<std::string>& aggregate_columns() {
  static const std::vector<std::string> cols{
      "point",         "parameter",    "value",         "mode",          "mu",           "sigma2",
      "D",             "capacity",     "delta",         "replicas",      "achieved_mean", "achieved_var",
      "achieved_fano", "info_rate_nats", "gamma_x",     "ell_x",         "re_lower",     "var_lower",
      "fano_lower",    "fano_awgn",    "rd_discrete",   "clamp_fraction", "var_margin",  "rate_margin",
      "fano_margin",   "converse_ok",  "diverged"};
  return cols;
}

inline void write_aggregate_csv(std::ostream& out, const ExperimentResult& res) {
  using ratecost::detail::format_real;
  const auto& cols = aggregate_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : res.points) {
    out << r.index << ',' << r.parameter << ',' << format_real(r.value) << ',' << to_string(res.mode) << ','
        << format_real(r.mean_mu) << ',' << format_real(r.mean_sigma2) << ',' << format_real(r.config.model.D) << ','
        << format_real(r.capacity) << ',' << format_real(r.delta) << ',' << r.replicas << ','
        << format_real(r.achieved_mean) << ',' << format_real(r.achieved_var) << ',' << format_real(r.achieved_fano)
        << ',' << format_real(r.info_rate) << ',' << format_real(r.gamma_x) << ',' << format_real(r.ell_x) << ','
        << format_real(r.bounds.re_lower) << ',' << format_real(r.bounds.var_lower) << ','
        << format_real(r.bounds.fano_lower) << ',' << format_real(r.bounds.fano_awgn) << ','
        << format_real(r.discrete.raw) << ',' << format_real(r.clamp_fraction) << ',' << format_real(r.var_margin)
        << ',' << format_real(r.rate_margin) << ',' << format_real(r.fano_margin) << ',' << (r.converse_ok ? 1 : 0)
        << ',' << (r.diverged() ? 1 : 0) << '\n';
  }
}

/// Plot-ready columns for the mode: Fano against ell_X C with the AWGN curve,
/// variance against capacity, bound gap against delta, or the bound against D.
inline void write_plot_csv(std::ostream& out, const ExperimentResult& res) {
  using ratecost::detail::format_real;
  switch (res.mode) {
    case Mode::fano_sweep:
      out << "ell_C,achieved_fano,fano_awgn,fano_lower\n";
      for (const auto& r : res.points) {
        const double ell = std::isfinite(r.ell_x) ? r.ell_x : 1.0 / r.mean_mu;
        out << format_real(ell * r.capacity) << ',' << format_real(r.achieved_fano) << ','
            << format_real(1.0 / (ell * r.capacity + 1.0)) << ',' << format_real(r.bounds.fano_lower) << '\n';
      }
      break;
    case Mode::closed_loop:
      out << "capacity,achieved_var,var_lower,info_rate_nats,re_lower_at_achieved\n";
      for (const auto& r : res.points) {
        const double re = r.achieved_var > 0.0 ? rd_lower_continuous(r.mean_sigma2, r.mean_mu, r.achieved_var).value
                                               : kNaN;
        out << format_real(r.capacity) << ',' << format_real(r.achieved_var) << ',' << format_real(r.bounds.var_lower)
            << ',' << format_real(r.info_rate) << ',' << format_real(re) << '\n';
      }
      break;
    case Mode::delta_convergence:
      out << "delta,rd_discrete,rd_continuous,gap\n";
      for (const auto& r : res.points)
        out << format_real(r.delta) << ',' << format_real(r.discrete.raw) << ',' << format_real(r.continuous_raw)
            << ',' << format_real(std::abs(r.discrete.raw - r.continuous_raw)) << '\n';
      break;
    case Mode::bounds_only: {
      out << "point,D,re_lower\n";
      for (const auto& r : res.points) {
        const double open = r.mean_mu > 0.0 ? r.mean_sigma2 / (2.0 * r.mean_mu) : 4.0 * r.config.model.D;
        for (int k = 1; k <= 40; ++k) {
          const double D = open * k / 40.0;
          if (!(D > 0.0)) continue;
          out << r.index << ',' << format_real(D) << ','
              << format_real(rd_lower_continuous(r.mean_sigma2, r.mean_mu, D).value) << '\n';
        }
      }
      break;
    }
    case Mode::open_loop_sde:
    case Mode::open_loop_ssa:
      out << "point,t,x\n";
      for (const auto& r : res.points)
        for (std::size_t k = 0; k < r.sample_path.size(); ++k)
          out << r.index << ',' << format_real(r.sample_path.times[k]) << ',' << format_real(r.sample_path.values[k])
              << '\n';
      break;
  }
}

inline json summary_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
  json j;
  j["config"] = to_json(cfg);
  j["points"] = res.points.size();
  j["exit_code"] = res.exit_code();
  j["notes"] = res.notes;
  if (std::isfinite(res.convergence_slope)) j["convergence_slope"] = res.convergence_slope;
  bool ok = true;
  for (const auto& r : res.points) ok = ok && r.converse_ok;
  j["converse_ok"] = ok;
  return j;
}

/// Writes point_NNN.json, aggregate.csv, plot_data.csv and summary.json into `dir`.
inline void write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& r : res.points) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu.json", r.index);
    std::ofstream(dir / name) << to_json(r).dump(2) << '\n';
    if (!r.sample_path.empty()) {
      std::snprintf(name, sizeof name, "trajectory_%03zu.csv", r.index);
      std::ofstream traj(dir / name);
      write_csv(traj, r.sample_path);
    }
  }
  {
    std::ofstream agg(dir / "aggregate.csv");
    write_aggregate_csv(agg, res);
  }
  {
    std::ofstream plot(dir / "plot_data.csv");
    write_plot_csv(plot, res);
  }
  std::ofstream(dir / "summary.json") << summary_json(cfg, res).dump(2) << '\n';
}

}  // namespace ratecost::harness
