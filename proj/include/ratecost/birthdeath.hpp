#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "ratecost/errors.hpp"
#include "ratecost/random.hpp"
#include "ratecost/trajectory.hpp"

namespace ratecost {

/// Birth propensity lambda, per-molecule death propensity mu.
struct BirthDeathRates {
  double lambda = 0.0;
  double mu = 0.0;
};

/// Rates are refreshed at every multiple of the control interval and frozen in between.
using RatePolicy = std::function<BirthDeathRates(double t, std::int64_t x)>;

/// Piecewise-constant control record: interval k covers [k delta, (k+1) delta).
struct ControlPath {
  double delta = 1.0;
  std::vector<double> lambda;
  std::vector<double> mu;

  std::size_t size() const { return mu.size(); }

  static ControlPath constant(BirthDeathRates r, double delta, double horizon) {
    const auto n = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));
    return {delta, std::vector<double>(n, r.lambda), std::vector<double>(n, r.mu)};
  }
};

struct SsaRun {
  Trajectory trajectory;
  ControlPath controls;
  std::size_t births = 0;
  std::size_t deaths = 0;
};

namespace detail {

inline void check_rates(const BirthDeathRates& r) {
  if (!(r.lambda >= 0.0 && r.mu >= 0.0 && std::isfinite(r.lambda) && std::isfinite(r.mu)))
    throw std::domain_error("ssa: rates must be finite and non-negative");
}

/// Exact SSA with frozen rates on [t, t_end). `on_event(time, new_count)` is
/// called after each reaction. Returns the count at t_end.
template <class OnEvent>
std::int64_t ssa_interval(std::int64_t n, const BirthDeathRates& r, double t, double t_end, RandomStream& rng,
                          OnEvent&& on_event) {
  while (true) {
    const double birth = r.lambda;
    const double total = birth + r.mu * static_cast<double>(n);
    if (total <= 0.0) return n;
    t += rng.exponential(total);
    if (t >= t_end) return n;
    if (rng.uniform_positive() * total <= birth)
      ++n;
    else
      --n;
    on_event(t, n);
  }
}

}  // namespace detail

/// Advances a molecule count over `duration` with frozen rates; no recording.
inline std::int64_t ssa_advance(std::int64_t n, const BirthDeathRates& r, double duration, RandomStream& rng) {
  detail::check_rates(r);
  return detail::ssa_interval(n, r, 0.0, duration, rng, [](double, std::int64_t) {});
}

/**
 * Statistically exact jump path of the birth-death chain (birth rate lambda,
 * death rate mu n). The policy is queried at t = k delta with the current
 * count and its rates hold until the next boundary; the exponential clock is
 * simply restarted at each boundary, which is exact by memorylessness.
 */
inline SsaRun simulate_ssa(const RatePolicy& policy, std::int64_t x0, double delta, double horizon,
                           RandomStream& rng, std::uint64_t seed = 0, std::uint64_t stream = 0) {
  detail::require(x0 >= 0, "simulate_ssa: x0 must be >= 0");
  detail::require(delta > 0.0, "simulate_ssa: delta must be > 0");
  detail::require(horizon > 0.0, "simulate_ssa: horizon must be > 0");

  SsaRun run;
  run.trajectory.kind = TrajectoryKind::jump_process;
  run.trajectory.seed = seed;
  run.trajectory.stream = stream;
  run.controls.delta = delta;
  run.trajectory.push(0.0, static_cast<double>(x0));

  std::int64_t n = x0;
  const auto intervals = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));
  run.controls.lambda.reserve(intervals);
  run.controls.mu.reserve(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    const double t0 = static_cast<double>(k) * delta;
    const double t1 = std::min(horizon, t0 + delta);
    const BirthDeathRates r = policy(t0, n);
    detail::check_rates(r);
    run.controls.lambda.push_back(r.lambda);
    run.controls.mu.push_back(r.mu);
    n = detail::ssa_interval(n, r, t0, t1, rng, [&](double t, std::int64_t count) {
      if (count > static_cast<std::int64_t>(run.trajectory.values.back()))
        ++run.births;
      else
        ++run.deaths;
      run.trajectory.push(t, static_cast<double>(count));
    });
  }
  run.trajectory.push(horizon, static_cast<double>(n));
  return run;
}

inline RatePolicy constant_rates(BirthDeathRates r) {
  return [r](double, std::int64_t) { return r; };
}

/// Noise intensity of the Langevin approximation: lambda + mu E[X] / gamma_X.
inline double langevin_sigma2(double lambda, double mu, double mean_x, double gamma_x) {
  detail::require(std::isfinite(lambda) && std::isfinite(mu) && std::isfinite(mean_x) && std::isfinite(gamma_x),
                  "langevin_sigma2: inputs must be finite");
  detail::require(mean_x >= 0.0, "langevin_sigma2: mean_x must be >= 0");
  detail::require(gamma_x > 0.0, "langevin_sigma2: gamma_x must be > 0");
  return lambda + mu * mean_x / gamma_x;
}

struct BioStats {
  double fano = 0.0;
  double gamma_x = 1.0;
  double ell_x = 0.0;
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_lambda = 0.0;
  double mean_mu = 0.0;
  double mean_mu_x = 0.0;
  double conservation_gap = 0.0;
  /// Little's-law lifetime and 1/E[mu] differ by more than 10%.
  bool lifetime_mismatch = false;
};

/**
 * Time-averaged biological statistics over [burn_in, end]:
 * F = Var/E[X], gamma = E[X]E[mu]/E[mu X], ell = E[X]/E[lambda].
 * Products mu(t) X(t) are integrated exactly over the common refinement of the
 * jump times and the control boundaries.
 */
inline BioStats bio_stats(const Trajectory& traj, const ControlPath& controls, double burn_in) {
  detail::require(traj.kind == TrajectoryKind::jump_process, "bio_stats: requires a jump-process trajectory");
  detail::require(traj.size() >= 2, "bio_stats: trajectory too short");
  detail::require(controls.delta > 0.0 && controls.lambda.size() == controls.mu.size() && controls.size() > 0,
                  "bio_stats: malformed control path");

  // Cumulative integrals of mu and lambda at interval boundaries.
  const std::size_t m = controls.size();
  std::vector<double> cum_mu(m + 1, 0.0), cum_lambda(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    cum_mu[k + 1] = cum_mu[k] + controls.mu[k] * controls.delta;
    cum_lambda[k + 1] = cum_lambda[k] + controls.lambda[k] * controls.delta;
  }
  auto integral = [&](const std::vector<double>& cum, const std::vector<double>& rate, double t) {
    const double pos = t / controls.delta;
    auto k = static_cast<std::size_t>(std::floor(pos));
    if (k >= m) return cum[m] + rate[m - 1] * (t - static_cast<double>(m) * controls.delta);
    return cum[k] + rate[k] * (t - static_cast<double>(k) * controls.delta);
  };

  const double t_start = std::max(burn_in, traj.times.front());
  const double t_end = traj.end_time();
  if (!(t_end > t_start)) throw DegenerateStatistics("bio_stats: empty post-burn-in window");

  RunningMoments x_acc;
  double mu_x = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double a = std::max(traj.times[i], t_start);
    const double b = traj.times[i + 1];
    if (b <= a) continue;
    x_acc.add(traj.values[i], b - a);
    mu_x += traj.values[i] * (integral(cum_mu, controls.mu, b) - integral(cum_mu, controls.mu, a));
  }
  const double window = t_end - t_start;

  BioStats s;
  s.mean_x = x_acc.mean();
  s.var_x = x_acc.variance();
  s.mean_mu = (integral(cum_mu, controls.mu, t_end) - integral(cum_mu, controls.mu, t_start)) / window;
  s.mean_lambda =
      (integral(cum_lambda, controls.lambda, t_end) - integral(cum_lambda, controls.lambda, t_start)) / window;
  s.mean_mu_x = mu_x / window;

  if (s.mean_x <= 0.0) throw DegenerateStatistics("bio_stats: E[X] = 0");
  if (s.mean_mu_x <= 0.0) throw DegenerateStatistics("bio_stats: E[mu X] = 0");

  s.fano = s.var_x / s.mean_x;
  s.gamma_x = s.mean_x * s.mean_mu / s.mean_mu_x;
  s.ell_x = s.mean_lambda > 0.0 ? s.mean_x / s.mean_lambda : std::numeric_limits<double>::infinity();
  s.conservation_gap = std::abs(s.mean_lambda - s.mean_mu_x);
  if (s.mean_mu > 0.0 && std::isfinite(s.ell_x))
    s.lifetime_mismatch = std::abs(s.ell_x - 1.0 / s.mean_mu) > 0.1 * s.ell_x;
  return s;
}

}  // namespace ratecost
