#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ratecost/errors.hpp"

/// Converse bounds and achievability conditions. All rates are in nats per
/// unit time unless the name says otherwise.
namespace ratecost {

struct RateBound {
  double value = 0.0;  ///< max(0, raw)
  double raw = 0.0;
  bool clamped = false;
};

/// Continuous-time rate-distortion lower bound E[sigma^2]/(2D) - E[mu].
inline RateBound rd_lower_continuous(double mean_sigma2, double mean_mu, double D) {
  detail::require(D > 0.0, "rd_lower_continuous: D must be > 0");
  detail::require(mean_sigma2 >= 0.0, "rd_lower_continuous: E[sigma^2] must be >= 0");
  const double raw = mean_sigma2 / (2.0 * D) - mean_mu;
  return {std::max(0.0, raw), raw, raw < 0.0};
}

/// Smallest stationary variance a channel of the given capacity can sustain.
/// Returns +inf when capacity + E[mu] <= 0: no finite variance is sustainable.
inline double var_lower(double mean_sigma2, double mean_mu, double capacity) {
  detail::require(capacity >= 0.0, "var_lower: capacity must be >= 0");
  detail::require(mean_sigma2 >= 0.0, "var_lower: E[sigma^2] must be >= 0");
  const double denom = capacity + mean_mu;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return mean_sigma2 / (2.0 * denom);
}

struct FanoBounds {
  double lower = 1.0;  ///< 1 / (ell C + gamma)
  double awgn = 1.0;   ///< 1 / (ell C + 1)
};

inline FanoBounds fano_bounds(double ell_x, double capacity, double gamma_x) {
  detail::require(ell_x > 0.0, "fano_bounds: ell_x must be > 0");
  detail::require(capacity >= 0.0, "fano_bounds: capacity must be >= 0");
  detail::require(gamma_x > 0.0, "fano_bounds: gamma_x must be > 0");
  return {1.0 / (ell_x * capacity + gamma_x), 1.0 / (ell_x * capacity + 1.0)};
}

/// Capacity of dY = V dt + dB with E[V^2] <= P and Var[dB] = N dt.
inline double awgn_capacity(double power, double noise_intensity) {
  detail::require(power >= 0.0, "awgn_capacity: power must be >= 0");
  detail::require(noise_intensity > 0.0, "awgn_capacity: noise intensity must be > 0");
  return power / (2.0 * noise_intensity);
}

// --- discrete-time bound ------------------------------------------------------

struct StepCoefficients {
  double A = 1.0;
  double sigma2 = 0.0;
};

struct DiscreteRateBound {
  double rate = 0.0;  ///< max(0, raw)
  double raw = 0.0;
  bool clamped = false;
  /// max of (1 - A^2)/sigma^2 over the tail window, all replicas.
  double ess_ratio = 0.0;
  /// 1/D >= ess_ratio.
  bool achievable = false;
};

/**
 * Streaming form of the sampled-system bound
 *
 *     (1 / (2 n delta)) sum_k log(A[k]^2 + sigma[k]^2 / D)
 *
 * for one replica of known length. The ess-limsup in the achievability
 * condition is replaced by a max over the last `tail_fraction` of the steps.
 */
class DiscreteRateAccumulator {
 public:
  DiscreteRateAccumulator() = default;
  DiscreteRateAccumulator(double D, double delta, std::size_t total_steps, double tail_fraction = 0.1)
      : D_(D), delta_(delta), total_(total_steps) {
    detail::require(D > 0.0, "rd_lower_discrete: D must be > 0");
    detail::require(delta > 0.0, "rd_lower_discrete: delta must be > 0");
    detail::require(tail_fraction > 0.0 && tail_fraction <= 1.0, "rd_lower_discrete: tail fraction must be in (0, 1]");
    const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(total_steps)));
    tail_start_ = total_steps - std::min(total_steps, std::max<std::size_t>(tail, 1));
  }

  void add(double A, double sigma2) {
    const double arg = A * A + sigma2 / D_;
    if (!(arg > 0.0)) throw std::domain_error("rd_lower_discrete: A^2 + sigma^2/D must be > 0");
    log_sum_ += std::log(arg);
    if (seen_ >= tail_start_) {
      const double num = 1.0 - A * A;
      double ratio;
      if (sigma2 > 0.0)
        ratio = num / sigma2;
      else
        ratio = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      ess_ratio_ = std::max(ess_ratio_, ratio);
    }
    ++seen_;
  }

  std::size_t steps() const { return seen_; }
  double rate() const { return seen_ ? log_sum_ / (2.0 * static_cast<double>(seen_) * delta_) : 0.0; }
  double ess_ratio() const { return ess_ratio_; }
  double D() const { return D_; }

 private:
  double D_ = 1.0;
  double delta_ = 1.0;
  std::size_t total_ = 0;
  std::size_t tail_start_ = 0;
  std::size_t seen_ = 0;
  double log_sum_ = 0.0;
  double ess_ratio_ = -std::numeric_limits<double>::infinity();
};

/// Expectation over replicas of the per-replica Cesaro averages.
inline DiscreteRateBound combine(std::span<const DiscreteRateAccumulator> replicas) {
  detail::require(!replicas.empty(), "rd_lower_discrete: no replicas");
  DiscreteRateBound out;
  double sum = 0.0;
  out.ess_ratio = -std::numeric_limits<double>::infinity();
  for (const auto& r : replicas) {
    detail::require(r.steps() > 0, "rd_lower_discrete: empty step sequence");
    sum += r.rate();
    out.ess_ratio = std::max(out.ess_ratio, r.ess_ratio());
  }
  out.raw = sum / static_cast<double>(replicas.size());
  out.rate = std::max(0.0, out.raw);
  out.clamped = out.raw < 0.0;
  out.achievable = 1.0 / replicas.front().D() >= out.ess_ratio;
  return out;
}

inline DiscreteRateBound rd_lower_discrete(std::span<const std::vector<StepCoefficients>> replicas, double D,
                                           double delta, double tail_fraction = 0.1) {
  detail::require(!replicas.empty(), "rd_lower_discrete: no replicas");
  std::vector<DiscreteRateAccumulator> acc;
  acc.reserve(replicas.size());
  for (const auto& steps : replicas) {
    detail::require(!steps.empty(), "rd_lower_discrete: empty step sequence");
    DiscreteRateAccumulator a(D, delta, steps.size(), tail_fraction);
    for (const auto& s : steps) a.add(s.A, s.sigma2);
    acc.push_back(a);
  }
  return combine(acc);
}

// --- conditional Gaussian distortion-rate -----------------------------------

/// One atom of the side-information law: P[U = u] and Var[X | U = u].
struct GaussianAtom {
  double probability = 1.0;
  double variance = 1.0;
};

struct ConditionalDistortion {
  double distortion = 0.0;
  bool achievable = false;
  /// Per-atom rates r_u in the input order (0 for zero-variance atoms).
  std::vector<double> allocation;
};

/**
 * Lower bound on E(X - Y)^2 over test channels with I(X; Y | U) <= r, X | U=u
 * Gaussian with variance sigma_u^2:
 *
 *     exp(-2 r + E[log sigma_U^2])
 *
 * attained by r_u = r - E[log sigma_U] + log sigma_u whenever every r_u >= 0.
 * Zero-variance atoms cost nothing; the bound is then taken over the
 * positive-variance part with its conditional law and the budget rescaled by
 * that part's mass.
 */
inline ConditionalDistortion conditional_gaussian_dr(double r, std::span<const GaussianAtom> atoms) {
  if (!(r >= 0.0)) throw std::domain_error("conditional_gaussian_dr: rate must be >= 0");
  detail::require(!atoms.empty(), "conditional_gaussian_dr: empty distribution");
  double total = 0.0, mass = 0.0;
  for (const auto& a : atoms) {
    detail::require(a.probability >= 0.0 && a.variance >= 0.0, "conditional_gaussian_dr: negative atom");
    total += a.probability;
    if (a.variance > 0.0) mass += a.probability;
  }
  detail::require(std::abs(total - 1.0) < 1e-9, "conditional_gaussian_dr: probabilities must sum to 1");

  ConditionalDistortion out;
  out.allocation.assign(atoms.size(), 0.0);
  if (mass <= 0.0) {
    out.achievable = true;
    return out;
  }

  double mean_log_var = 0.0;
  for (const auto& a : atoms)
    if (a.variance > 0.0) mean_log_var += a.probability / mass * std::log(a.variance);
  const double budget = r / mass;
  out.distortion = mass * std::exp(-2.0 * budget + mean_log_var);

  double need = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].variance <= 0.0 || atoms[i].probability <= 0.0) continue;
    const double log_sigma = 0.5 * std::log(atoms[i].variance);
    need = std::max(need, 0.5 * mean_log_var - log_sigma);
    out.allocation[i] = budget - 0.5 * mean_log_var + log_sigma;
  }
  out.achievable = budget >= need;
  return out;
}

/// Distortion realized by a per-atom allocation: sum p_u sigma_u^2 exp(-2 r_u).
inline double allocation_distortion(std::span<const GaussianAtom> atoms, std::span<const double> rates) {
  detail::require(atoms.size() == rates.size(), "allocation_distortion: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) d += atoms[i].probability * atoms[i].variance * std::exp(-2.0 * rates[i]);
  return d;
}

// --- report -------------------------------------------------------------------

struct BoundsInput {
  double mean_sigma2 = 0.0;
  double mean_mu = 0.0;
  double D = 1.0;
  double capacity = 0.0;
  double ell_x = std::numeric_limits<double>::quiet_NaN();
  double gamma_x = 1.0;
  /// ess sup of 2 mu / sigma^2 (the delta -> 0 form of (1 - A^2)/sigma_d^2).
  /// NaN means "derive from the constant means".
  double ess_ratio = std::numeric_limits<double>::quiet_NaN();
  /// ess sup of (1 - mu^2)/sigma^2, the condition read with the rate itself.
  double ess_ratio_literal = std::numeric_limits<double>::quiet_NaN();
};

struct BoundsReport {
  double re_lower = 0.0;
  double var_lower = 0.0;
  double fano_lower = std::numeric_limits<double>::quiet_NaN();
  double fano_awgn = std::numeric_limits<double>::quiet_NaN();
  bool achievable = false;
  bool achievable_literal = false;
  bool clamped = false;
};

inline double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  if (num > 0.0) return std::numeric_limits<double>::infinity();
  return 0.0;
}

inline BoundsReport evaluate_bounds(const BoundsInput& in) {
  BoundsReport rep;
  const RateBound re = rd_lower_continuous(in.mean_sigma2, in.mean_mu, in.D);
  rep.re_lower = re.value;
  rep.clamped = re.clamped;
  rep.var_lower = var_lower(in.mean_sigma2, in.mean_mu, in.capacity);
  if (std::isfinite(in.ell_x) && in.ell_x > 0.0 && in.gamma_x > 0.0) {
    const FanoBounds f = fano_bounds(in.ell_x, in.capacity, in.gamma_x);
    rep.fano_lower = f.lower;
    rep.fano_awgn = f.awgn;
  }
  const double ratio = std::isnan(in.ess_ratio) ? safe_ratio(2.0 * in.mean_mu, in.mean_sigma2) : in.ess_ratio;
  const double literal = std::isnan(in.ess_ratio_literal)
                             ? safe_ratio(1.0 - in.mean_mu * in.mean_mu, in.mean_sigma2)
                             : in.ess_ratio_literal;
  rep.achievable = 1.0 / in.D >= ratio;
  rep.achievable_literal = 1.0 / in.D >= literal;
  return rep;
}

}  // namespace ratecost
