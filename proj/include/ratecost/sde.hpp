#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "ratecost/errors.hpp"
#include "ratecost/quadrature.hpp"
#include "ratecost/random.hpp"
#include "ratecost/stats.hpp"
#include "ratecost/trajectory.hpp"

/**
 * Generalized Ornstein-Uhlenbeck model
 *
 *     dX = (lambda - mu X) dt + sigma dW
 *
 * where the control triple {mu, lambda, sigma^2} may change with time, plus its
 * exact sampled-data form X[k+1] = A X[k] + lam + W[k].
 */
namespace ratecost {

/// Control triple at an instant: degradation rate, production rate, noise intensity.
struct ControlSample {
  double mu = 0.0;
  double lambda = 0.0;
  double sigma2 = 0.0;
};

struct ModelConfig {
  double mu_max = 1.0;
  double x_star = 0.0;
  double D = 1.0;
  double x0_mean = 0.0;
  double x0_var = 1.0;
  bool allow_signed_lambda = false;

  /// Initial law defaults to the target stationary law N(x_star, D).
  static ModelConfig centered(double mu_max, double x_star, double D, bool signed_lambda = false) {
    return ModelConfig{mu_max, x_star, D, x_star, D, signed_lambda};
  }

  void validate() const {
    detail::require(D > 0.0, "model: D must be > 0");
    detail::require(mu_max > 0.0, "model: mu_max must be > 0");
    detail::require(x0_var >= 0.0, "model: x0_var must be >= 0");
    detail::require(std::isfinite(x_star) && std::isfinite(x0_mean), "model: x_star and x0_mean must be finite");
  }
};

/// Throws ConstraintViolation unless the sample is admissible under `model`.
inline void check_control(const ControlSample& u, const ModelConfig& model) {
  if (!(std::isfinite(u.mu) && std::isfinite(u.lambda) && std::isfinite(u.sigma2)))
    throw ConstraintViolation("control: non-finite component");
  if (u.mu < 0.0) throw ConstraintViolation("control: mu must be >= 0");
  if (u.mu > model.mu_max)
    throw ConstraintViolation("control: mu = " + std::to_string(u.mu) + " exceeds mu_max = " +
                              std::to_string(model.mu_max));
  if (u.sigma2 < 0.0) throw ConstraintViolation("control: sigma2 must be >= 0");
  if (u.lambda < 0.0 && !model.allow_signed_lambda)
    throw ConstraintViolation("control: negative lambda requires allow_signed_lambda");
}

/// One step of the sampled system: X' = A X + lam + W, W ~ N(0, sigma2).
struct DiscreteStep {
  double A = 1.0;
  double lam = 0.0;
  double sigma2 = 0.0;
  double delta = 1.0;
};

inline void validate(const DiscreteStep& s, double mu_max = std::numeric_limits<double>::infinity()) {
  detail::require(s.delta > 0.0, "step: delta must be > 0");
  detail::require(s.sigma2 >= 0.0, "step: sigma2 must be >= 0");
  detail::require(s.A > 0.0 && s.A <= 1.0, "step: A must lie in (0, 1]");
  if (std::isfinite(mu_max))
    detail::require(s.A >= std::exp(-mu_max * s.delta) * (1.0 - 1e-12), "step: A below exp(-mu_max delta)");
}

/// Closed-form discretization for controls held constant over the interval.
inline DiscreteStep discretize_constant(const ControlSample& u, double delta) {
  detail::require(delta > 0.0, "discretize: delta must be > 0");
  const double x = u.mu * delta;
  DiscreteStep s;
  s.A = std::exp(-x);
  s.lam = u.lambda * delta * one_minus_exp_ratio(x);
  s.sigma2 = u.sigma2 * delta * one_minus_exp_ratio(2.0 * x);
  s.delta = delta;
  return s;
}

using Path = std::function<double(double)>;

/**
 * Exact discretization of time-varying coefficients over [t0, t0 + delta]:
 *
 *     A     = exp(-int mu)
 *     lam   = int exp(-int_tau mu) lambda(tau) dtau
 *     sigma2 = int exp(-2 int_tau mu) sigma2(tau) dtau
 *
 * Both the outer integrals and the inner decay integrals use composite Simpson
 * with `quad_points` nodes, so cost is quadratic in the node count.
 */
inline DiscreteStep exact_discretize(const Path& mu, const Path& lambda, const Path& sigma2, double t0,
                                     double delta, int quad_points = 9) {
  detail::require(delta > 0.0, "exact_discretize: delta must be > 0");
  detail::require(quad_points >= 2, "exact_discretize: quad_points must be >= 2");
  const double t1 = t0 + delta;

  auto eval = [](const Path& f, double t, const char* name) {
    const double v = f(t);
    if (!std::isfinite(v)) throw EvaluationError(std::string("exact_discretize: non-finite ") + name + " at t = " +
                                                 std::to_string(t));
    return v;
  };
  auto mu_at = [&](double t) { return eval(mu, t, "mu"); };
  auto decay_from = [&](double tau) { return simpson(mu_at, tau, t1, quad_points); };

  DiscreteStep s;
  s.delta = delta;
  s.A = std::exp(-decay_from(t0));
  s.lam = simpson([&](double tau) { return std::exp(-decay_from(tau)) * eval(lambda, tau, "lambda"); }, t0, t1,
                  quad_points);
  s.sigma2 = simpson(
      [&](double tau) {
        const double v = eval(sigma2, tau, "sigma2");
        if (v < 0.0) throw std::domain_error("exact_discretize: negative sigma2 at t = " + std::to_string(tau));
        return std::exp(-2.0 * decay_from(tau)) * v;
      },
      t0, t1, quad_points);
  return s;
}

inline double step_discrete(double x, const DiscreteStep& step, RandomStream& rng) {
  const double noise = step.sigma2 > 0.0 ? std::sqrt(step.sigma2) * rng.normal() : 0.0;
  return step.A * x + step.lam + noise;
}

enum class Integrator { euler_maruyama, exact };

/// Controls are held for one `dt` interval; the policy sees time and current state.
using ControlPolicy = std::function<ControlSample(double t, double x)>;

struct SimulationOptions {
  double dt = 1e-3;
  double horizon = 1.0;
  Integrator integrator = Integrator::exact;
  /// Record every n-th state; the initial state is always recorded.
  std::size_t record_stride = 1;
};

/// Time averages of the applied controls. mean_sigma4 is the empirical
/// fourth moment of sigma that the regularity condition requires to be finite.
struct ControlMoments {
  double mean_mu = 0.0;
  double mean_lambda = 0.0;
  double mean_sigma2 = 0.0;
  double mean_sigma4 = 0.0;
  double max_mu = 0.0;
};

struct SdeRun {
  Trajectory trajectory;
  ControlMoments controls;
};

inline SdeRun simulate_sde(const ModelConfig& model, const ControlPolicy& policy, const SimulationOptions& opt,
                           RandomStream& rng, std::uint64_t seed = 0, std::uint64_t stream = 0) {
  model.validate();
  detail::require(opt.dt > 0.0, "simulate_sde: dt must be > 0");
  detail::require(opt.horizon >= opt.dt, "simulate_sde: horizon must be >= dt");
  const auto steps = static_cast<std::size_t>(std::llround(opt.horizon / opt.dt));
  const std::size_t stride = opt.record_stride == 0 ? 1 : opt.record_stride;

  SdeRun run;
  run.trajectory.kind =
      opt.integrator == Integrator::exact ? TrajectoryKind::sampled : TrajectoryKind::continuous_diffusion;
  run.trajectory.seed = seed;
  run.trajectory.stream = stream;
  run.trajectory.times.reserve(steps / stride + 2);
  run.trajectory.values.reserve(steps / stride + 2);

  double x = model.x0_var > 0.0 ? rng.normal(model.x0_mean, model.x0_var) : model.x0_mean;
  run.trajectory.push(0.0, x);

  RunningMoments mu_acc, lambda_acc, s2_acc, s4_acc;
  double max_mu = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * opt.dt;
    const ControlSample u = policy(t, x);
    check_control(u, model);
    mu_acc.add(u.mu);
    lambda_acc.add(u.lambda);
    s2_acc.add(u.sigma2);
    s4_acc.add(u.sigma2 * u.sigma2);
    max_mu = std::max(max_mu, u.mu);

    if (opt.integrator == Integrator::exact) {
      x = step_discrete(x, discretize_constant(u, opt.dt), rng);
    } else {
      x += (u.lambda - u.mu * x) * opt.dt + std::sqrt(u.sigma2 * opt.dt) * rng.normal();
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) run.trajectory.push(static_cast<double>(k + 1) * opt.dt, x);
  }
  run.controls = {mu_acc.mean(), lambda_acc.mean(), s2_acc.mean(), s4_acc.mean(), max_mu};
  return run;
}

/// Policy holding one control sample forever.
inline ControlPolicy constant_policy(ControlSample u) {
  return [u](double, double) { return u; };
}

}  // namespace ratecost
