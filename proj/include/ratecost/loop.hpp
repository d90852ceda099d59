#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ratecost/birthdeath.hpp"
#include "ratecost/bounds.hpp"
#include "ratecost/errors.hpp"
#include "ratecost/parallel.hpp"
#include "ratecost/random.hpp"
#include "ratecost/sde.hpp"
#include "ratecost/stats.hpp"
#include "ratecost/trajectory.hpp"

/**
 * Closed control loop over a continuous AWGN channel, run at sampling interval
 * delta:
 *
 *   plant X[k] --> encoder V = alpha (X - Xbar) --> dY = V delta + dB
 *        ^                                              |
 *        +---- controller lambda(Xhat) <-- Kalman filter+
 *
 * The encoder scale alpha = sqrt(P / p_prior) is computed from the filter's own
 * variance recursion, which both ends can run without seeing data.
 */
namespace ratecost {

struct ChannelConfig {
  double power = 0.0;            ///< P, bound on E[V^2]
  double noise_intensity = 1.0;  ///< N, Var[dB] = N dt
  double delta = 1e-3;

  void validate() const {
    detail::require(power >= 0.0, "channel: power must be >= 0");
    detail::require(noise_intensity > 0.0, "channel: noise_intensity must be > 0");
    detail::require(delta > 0.0, "channel: delta must be > 0");
  }
  double capacity() const { return awgn_capacity(power, noise_intensity); }
};

struct LoopState {
  double xhat = 0.0;     ///< posterior estimate
  double xbar = 0.0;     ///< prior prediction
  double p_prior = 0.0;
  double p_post = 0.0;
  double gain = 0.0;
  double alpha = 0.0;
  double info_nats = 0.0;  ///< sum of per-step information r[k]
};

inline LoopState initial_loop_state(const ModelConfig& model) {
  LoopState s;
  s.xhat = s.xbar = model.x0_mean;
  s.p_prior = s.p_post = model.x0_var;
  return s;
}

/// alpha = sqrt(P / p_prior); 0 when there is no power or nothing left to send.
inline double encoder_scale(double p_prior, const ChannelConfig& cfg) {
  if (cfg.power <= 0.0 || p_prior <= 0.0) return 0.0;
  return std::sqrt(cfg.power / p_prior);
}

inline double encode(double x, const LoopState& state, const ChannelConfig& cfg) {
  return encoder_scale(state.p_prior, cfg) * (x - state.xbar);
}

/// Sampled increment of dY = V dt + dB over one interval. A zero noise
/// intensity gives the noiseless channel.
inline double channel_transmit(double v, const ChannelConfig& cfg, RandomStream& rng) {
  const double noise = cfg.noise_intensity > 0.0 ? std::sqrt(cfg.noise_intensity * cfg.delta) * rng.normal() : 0.0;
  return v * cfg.delta + noise;
}

namespace detail {

inline void check_finite_state(const LoopState& s) {
  if (!(std::isfinite(s.p_prior) && std::isfinite(s.p_post) && std::isfinite(s.xhat) && std::isfinite(s.xbar)))
    throw NumericalDivergence("kalman: non-finite covariance or estimate");
}

/// Scalar measurement update with gain K; r = -1/2 log(1 - K).
inline LoopState apply_gain(LoopState s, double gain, double innovation) {
  s.gain = gain;
  s.xhat = s.xbar + gain * innovation;
  s.p_post = (1.0 - gain) * s.p_prior;
  if (gain > 0.0) s.info_nats += gain < 1.0 ? -0.5 * std::log1p(-gain) : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace detail

/// Direct observation y = X + n, n ~ N(0, noise_var), as in the auxiliary
/// channel used for the achievability construction.
inline LoopState observe(double y, double noise_var, const LoopState& state) {
  detail::require(noise_var >= 0.0, "observe: noise variance must be >= 0");
  LoopState s = state;
  s.alpha = 0.0;
  const double gain = s.p_prior > 0.0 ? s.p_prior / (s.p_prior + noise_var) : 0.0;
  s = detail::apply_gain(s, gain, y - s.xbar);
  detail::check_finite_state(s);
  return s;
}

/// Measurement update from one channel increment. Dividing dy by alpha delta
/// turns it into X + noise with variance rho^2 = N / (alpha^2 delta).
inline LoopState measurement_update(double dy, const LoopState& state, const ChannelConfig& cfg) {
  LoopState s = state;
  const double alpha = encoder_scale(s.p_prior, cfg);
  s.alpha = alpha;
  if (alpha == 0.0) return detail::apply_gain(s, 0.0, 0.0);
  const double snr = s.p_prior * alpha * alpha * cfg.delta;
  const double gain = snr / (snr + cfg.noise_intensity);
  s = detail::apply_gain(s, gain, dy / (alpha * cfg.delta));
  detail::check_finite_state(s);
  return s;
}

/// Prediction through one plant step: Xbar' = A Xhat + lam, p' = A^2 p + sigma^2.
inline LoopState time_update(const LoopState& state, const DiscreteStep& step) {
  LoopState s = state;
  s.xbar = step.A * s.xhat + step.lam;
  s.p_prior = step.A * step.A * s.p_post + step.sigma2;
  detail::check_finite_state(s);
  return s;
}

inline LoopState kalman_update(double dy, const LoopState& state, const DiscreteStep& step, const ChannelConfig& cfg) {
  return time_update(measurement_update(dy, state, cfg), step);
}

/// Positive root of p^2/rho^2 + 2 mu p - sigma^2 = 0 (stationary continuous Riccati).
inline double riccati_root(double mu, double sigma2, double rho2) {
  detail::require(rho2 > 0.0 && sigma2 >= 0.0, "riccati_root: need rho2 > 0, sigma2 >= 0");
  return sigma2 / (mu + std::sqrt(mu * mu + sigma2 / rho2));
}

// --- controller ---------------------------------------------------------------

enum class FeedbackMode {
  /// Chooses the additive term so the predicted deviation is cancelled in one
  /// step: lam = (1 - A) x* - A (Xhat - x*), i.e. X[k+1] - x* = A Z[k] + W[k].
  deadbeat,
  /// Rate-form law lambda = mu (2 x* - Xhat), i.e. mean holding plus
  /// proportional correction with gain mu.
  proportional,
};

inline const char* to_string(FeedbackMode m) { return m == FeedbackMode::deadbeat ? "deadbeat" : "proportional"; }

struct ControlDecision {
  ControlSample sample;
  /// Discrete additive term the sample produces over one interval.
  double lam = 0.0;
  bool clamped = false;
};

inline ControlDecision control_action(const LoopState& state, double mu, double sigma2, const ModelConfig& model,
                                      FeedbackMode mode, double delta) {
  detail::require(delta > 0.0, "control_action: delta must be > 0");
  const double hold = delta * one_minus_exp_ratio(mu * delta);  // lam per unit lambda
  const double deviation = state.xhat - model.x_star;
  ControlDecision d;
  d.sample.mu = mu;
  d.sample.sigma2 = sigma2;
  if (mode == FeedbackMode::deadbeat) {
    const double A = std::exp(-mu * delta);
    d.sample.lambda = ((1.0 - A) * model.x_star - A * deviation) / hold;
  } else {
    d.sample.lambda = mu * (model.x_star - deviation);
  }
  if (d.sample.lambda < 0.0 && !model.allow_signed_lambda) {
    d.sample.lambda = 0.0;
    d.clamped = true;
  }
  d.lam = d.sample.lambda * hold;
  return d;
}

// --- closed-loop runs ---------------------------------------------------------

enum class PlantKind { linear_gaussian, birth_death };

inline const char* to_string(PlantKind k) { return k == PlantKind::linear_gaussian ? "linear-gaussian" : "birth-death"; }

/// The filter always models the plant as linear Gaussian with noise intensity
/// `sigma2`. For a birth-death plant this is the Langevin surrogate.
struct PlantConfig {
  PlantKind kind = PlantKind::linear_gaussian;
  double sigma2 = 1.0;
};

/// Degradation rate as a function of the posterior estimate and the step index.
using MuSchedule = std::function<double(double xhat, std::size_t k)>;

inline MuSchedule constant_mu(double mu) {
  return [mu](double, std::size_t) { return mu; };
}

struct LoopOptions {
  double horizon = 1.0;
  double burn_in = 0.0;
  FeedbackMode feedback = FeedbackMode::deadbeat;
  /// Floor a > 0 on scheduled mu, if the schedule must respect one.
  double mu_floor = 0.0;
  /// Record every n-th X[k]; 0 records nothing.
  std::size_t record_stride = 0;
  double tail_fraction = 0.1;
  /// A replica is abandoned once (X - x*)^2 exceeds this multiple of D.
  double divergence_factor = 1e6;
};

struct ReplicaResult {
  RunningMoments x;  ///< X[k] at sample times after burn-in
  RunningMoments lambda, mu, mu_x, sigma2, power;
  RunningCovariance error_vs_estimate;  ///< (X - Xhat, Xhat)
  DiscreteRateAccumulator rd;
  double info_nats = 0.0;
  std::size_t steps = 0;
  std::size_t control_steps = 0;
  std::size_t clamp_events = 0;
  double tail_mu_min = std::numeric_limits<double>::infinity();
  LoopState final_state;
  bool diverged = false;
  std::string divergence_note;
  Trajectory trajectory;
};

inline ReplicaResult run_loop_replica(const ModelConfig& model, const ChannelConfig& channel, const PlantConfig& plant,
                                      const MuSchedule& schedule, const LoopOptions& opt, std::uint64_t seed,
                                      std::uint64_t replica) {
  model.validate();
  channel.validate();
  detail::require(plant.sigma2 >= 0.0, "loop: plant sigma2 must be >= 0");
  detail::require(opt.horizon >= channel.delta, "loop: horizon must be >= delta");

  const double delta = channel.delta;
  const auto steps = static_cast<std::size_t>(std::llround(opt.horizon / delta));
  const auto tail_start =
      steps - std::min(steps, static_cast<std::size_t>(std::ceil(opt.tail_fraction * static_cast<double>(steps))));
  RandomStream rng = RandomStream::derive(seed, replica);

  ReplicaResult res;
  res.rd = DiscreteRateAccumulator(model.D, delta, steps, opt.tail_fraction);
  res.trajectory.kind = plant.kind == PlantKind::birth_death ? TrajectoryKind::jump_process : TrajectoryKind::sampled;
  res.trajectory.seed = seed;
  res.trajectory.stream = replica;

  double x = model.x0_var > 0.0 ? rng.normal(model.x0_mean, model.x0_var) : model.x0_mean;
  if (plant.kind == PlantKind::birth_death) x = std::max(0.0, std::round(x));
  LoopState state = initial_loop_state(model);

  // Discretization cache; schedules are usually constant.
  double cached_mu = std::numeric_limits<double>::quiet_NaN();
  DiscreteStep cached;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * delta;
    const bool stationary = t >= opt.burn_in;
    if (opt.record_stride && k % opt.record_stride == 0) res.trajectory.push(t, x);
    if (stationary) res.x.add(x);

    const double v = encode(x, state, channel);
    const double dy = channel_transmit(v, channel, rng);
    state = measurement_update(dy, state, channel);
    if (stationary) {
      res.power.add(v * v);
      res.error_vs_estimate.add(x - state.xhat, state.xhat);
    }

    const double mu = schedule(state.xhat, k);
    if (!(mu >= opt.mu_floor && mu >= 0.0 && mu <= model.mu_max))
      throw ConstraintViolation("loop: scheduled mu = " + std::to_string(mu) + " outside [mu_floor, mu_max]");
    const ControlDecision u = control_action(state, mu, plant.sigma2, model, opt.feedback, delta);
    if (u.clamped) ++res.clamp_events;
    ++res.control_steps;

    if (!(mu == cached_mu)) {
      cached = discretize_constant({mu, 0.0, plant.sigma2}, delta);
      cached_mu = mu;
    }
    DiscreteStep step = cached;
    step.lam = u.lam;
    res.rd.add(step.A, step.sigma2);
    if (k >= tail_start) res.tail_mu_min = std::min(res.tail_mu_min, mu);
    if (stationary) {
      res.lambda.add(u.sample.lambda);
      res.mu.add(mu);
      res.mu_x.add(mu * x);
      res.sigma2.add(plant.sigma2);
    }

    if (plant.kind == PlantKind::linear_gaussian) {
      x = step_discrete(x, step, rng);
    } else {
      x = static_cast<double>(
          ssa_advance(static_cast<std::int64_t>(x), {u.sample.lambda, mu}, delta, rng));
    }
    state = time_update(state, step);
    res.steps = k + 1;

    const double dev = x - model.x_star;
    if (!std::isfinite(x) || dev * dev > opt.divergence_factor * model.D) {
      res.diverged = true;
      res.divergence_note = "state left the divergence envelope at t = " + std::to_string(t + delta);
      break;
    }
  }
  res.info_nats = state.info_nats;
  res.final_state = state;
  return res;
}

struct ClosedLoopResult {
  std::vector<Trajectory> trajectories;
  double achieved_mean = 0.0;
  double achieved_var = 0.0;
  double achieved_fano = std::numeric_limits<double>::quiet_NaN();
  double info_rate = 0.0;  ///< nats per unit time
  BoundsReport bounds;
  DiscreteRateBound discrete_bound;
  double clamp_fraction = 0.0;
  std::size_t replicas = 0;
  std::size_t diverged_replicas = 0;
  std::uint64_t seed = 0;
  double capacity = 0.0;
  double mean_power = 0.0;
  double error_estimate_correlation = std::numeric_limits<double>::quiet_NaN();
  double mean_mu = 0.0;
  double mean_lambda = 0.0;
  double mean_sigma2 = 0.0;
  double gamma_x = std::numeric_limits<double>::quiet_NaN();
  double ell_x = std::numeric_limits<double>::quiet_NaN();
  double p_prior = 0.0;  ///< final a-priori error variance (replica mean)
  double p_post = 0.0;
  PlantKind plant = PlantKind::linear_gaussian;
  std::vector<std::string> notes;

  bool diverged() const { return diverged_replicas > 0; }
};

/// Pools replicas in index order; the result is independent of how they were scheduled.
inline ClosedLoopResult merge_replicas(std::vector<ReplicaResult>& parts, const ModelConfig& model,
                                       const ChannelConfig& channel, const PlantConfig& plant, std::uint64_t seed,
                                       bool keep_trajectories = true) {
  detail::require(!parts.empty(), "loop: no replicas");
  ClosedLoopResult out;
  out.replicas = parts.size();
  out.seed = seed;
  out.plant = plant.kind;
  out.capacity = channel.capacity();

  RunningMoments x, lambda, mu, mu_x, sigma2, power;
  RunningCovariance zc;
  std::vector<DiscreteRateAccumulator> rd;
  double info = 0.0, time = 0.0, mu_min = std::numeric_limits<double>::infinity();
  std::size_t clamps = 0, control_steps = 0;
  for (auto& p : parts) {
    if (p.diverged) {
      ++out.diverged_replicas;
      out.notes.push_back("replica " + std::to_string(p.trajectory.stream) + ": " + p.divergence_note);
    }
    x.merge(p.x);
    lambda.merge(p.lambda);
    mu.merge(p.mu);
    mu_x.merge(p.mu_x);
    sigma2.merge(p.sigma2);
    power.merge(p.power);
    zc.merge(p.error_vs_estimate);
    if (p.rd.steps() > 0) rd.push_back(p.rd);
    info += p.info_nats;
    time += static_cast<double>(p.steps) * channel.delta;
    clamps += p.clamp_events;
    control_steps += p.control_steps;
    mu_min = std::min(mu_min, p.tail_mu_min);
    out.p_prior += p.final_state.p_prior / static_cast<double>(parts.size());
    out.p_post += p.final_state.p_post / static_cast<double>(parts.size());
    if (keep_trajectories && !p.trajectory.empty()) out.trajectories.push_back(std::move(p.trajectory));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.achieved_mean = x.empty() ? nan : x.mean();
  out.achieved_var = x.empty() ? nan : x.variance();
  if (out.achieved_mean > 0.0) out.achieved_fano = out.achieved_var / out.achieved_mean;
  out.info_rate = time > 0.0 ? info / time : 0.0;
  out.clamp_fraction = control_steps ? static_cast<double>(clamps) / static_cast<double>(control_steps) : 0.0;
  out.mean_power = power.empty() ? nan : power.mean();
  out.error_estimate_correlation = zc.correlation();
  out.mean_mu = mu.empty() ? nan : mu.mean();
  out.mean_lambda = lambda.empty() ? nan : lambda.mean();
  out.mean_sigma2 = sigma2.empty() ? plant.sigma2 : sigma2.mean();
  if (!mu_x.empty() && mu_x.mean() > 0.0 && out.achieved_mean > 0.0)
    out.gamma_x = out.achieved_mean * out.mean_mu / mu_x.mean();
  if (out.mean_lambda > 0.0 && out.achieved_mean > 0.0) out.ell_x = out.achieved_mean / out.mean_lambda;

  if (!rd.empty()) out.discrete_bound = combine(rd);

  BoundsInput in;
  in.mean_sigma2 = out.mean_sigma2;
  in.mean_mu = std::isnan(out.mean_mu) ? 0.0 : out.mean_mu;
  in.D = model.D;
  in.capacity = out.capacity;
  in.ell_x = out.ell_x;
  in.gamma_x = std::isnan(out.gamma_x) ? 1.0 : out.gamma_x;
  if (!rd.empty()) in.ess_ratio = out.discrete_bound.ess_ratio;
  if (std::isfinite(mu_min)) in.ess_ratio_literal = safe_ratio(1.0 - mu_min * mu_min, plant.sigma2);
  out.bounds = evaluate_bounds(in);
  return out;
}

inline ClosedLoopResult run_closed_loop(const ModelConfig& model, const ChannelConfig& channel,
                                        const PlantConfig& plant, const MuSchedule& schedule,
                                        const LoopOptions& opt, std::size_t replicas, std::uint64_t seed,
                                        std::size_t workers = 1) {
  detail::require(replicas >= 1, "loop: replicas must be >= 1");
  std::vector<ReplicaResult> parts(replicas);
  parallel_for(replicas, workers, [&](std::size_t i) {
    parts[i] = run_loop_replica(model, channel, plant, schedule, opt, seed, i);
  });
  return merge_replicas(parts, model, channel, plant, seed);
}

/// Sum r[k] / (n delta) with r[k] = 1/2 log(p_prior / p_post). Exact only when
/// plant and channel are linear Gaussian.
inline double directed_info_rate(const ClosedLoopResult& run) {
  if (run.plant != PlantKind::linear_gaussian)
    throw Unsupported("directed_info_rate: Kalman accounting requires a linear-Gaussian plant");
  return run.info_rate;
}

// --- analytic companions of the deadbeat loop ----------------------------------

/// Stationary a-priori variance of the deadbeat loop with power-pinned encoder:
/// p = sigma_d^2 / (1 - A^2 / (1 + P delta / N)).
inline double deadbeat_stationary_variance(double mu, double sigma2, const ChannelConfig& ch) {
  const DiscreteStep s = discretize_constant({mu, 0.0, sigma2}, ch.delta);
  const double shrink = 1.0 / (1.0 + ch.power * ch.delta / ch.noise_intensity);
  const double denom = 1.0 - s.A * s.A * shrink;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return s.sigma2 / denom;
}

/// Inverse problem: channel power that pins the stationary variance at D.
/// Zero when D is at or above the open-loop variance; +inf when D is below the
/// one-step noise floor.
inline double power_for_variance(double mu, double sigma2, double D, double noise_intensity, double delta) {
  detail::require(D > 0.0 && noise_intensity > 0.0 && delta > 0.0, "power_for_variance: invalid arguments");
  const DiscreteStep s = discretize_constant({mu, 0.0, sigma2}, delta);
  if (D <= s.sigma2) return std::numeric_limits<double>::infinity();
  const double gain = s.A * s.A / (1.0 - s.sigma2 / D);
  return std::max(0.0, (gain - 1.0) * noise_intensity / delta);
}

}  // namespace ratecost
