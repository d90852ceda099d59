#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ratecost/errors.hpp"
#include "ratecost/stats.hpp"

namespace ratecost {

enum class TrajectoryKind { continuous_diffusion, jump_process, sampled };

inline const char* to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::continuous_diffusion: return "continuous-diffusion";
    case TrajectoryKind::jump_process: return "jump-process";
    case TrajectoryKind::sampled: return "sampled";
  }
  return "unknown";
}

/// Time-stamped state path. For jump processes each value holds until the next
/// stamp, and the last stamp marks the end of the observation window.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> values;
  TrajectoryKind kind = TrajectoryKind::sampled;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double end_time() const { return times.empty() ? 0.0 : times.back(); }

  void push(double t, double x) {
    times.push_back(t);
    values.push_back(x);
  }
};

/// Throws std::domain_error if the path breaks its invariants.
inline void validate(const Trajectory& traj) {
  detail::require(traj.times.size() == traj.values.size(), "trajectory: times/values length mismatch");
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    detail::require(traj.times[i] > traj.times[i - 1], "trajectory: times must be strictly increasing");
  if (traj.kind == TrajectoryKind::jump_process) {
    for (double v : traj.values)
      detail::require(v >= 0.0 && v == std::floor(v), "trajectory: jump-process values must be non-negative integers");
  }
}

struct StationaryMoments {
  double mean = 0.0;
  double variance = 0.0;
  double window = 0.0;
  /// Window shorter than ten relaxation times (only set when a relaxation time is given).
  bool short_window = false;
};

/// Accumulates the post-burn-in part of a path into `acc`. Jump paths are
/// integrated exactly as piecewise-constant functions; other kinds are sampled
/// on a uniform grid, so the sample average is the time average.
inline void accumulate_window(const Trajectory& traj, double burn_in, RunningMoments& acc) {
  if (traj.kind == TrajectoryKind::jump_process) {
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const double a = std::max(traj.times[i], burn_in);
      const double b = traj.times[i + 1];
      if (b > a) acc.add(traj.values[i], b - a);
    }
  } else {
    for (std::size_t i = 0; i < traj.size(); ++i)
      if (traj.times[i] >= burn_in) acc.add(traj.values[i]);
  }
}

/// Time-averaged mean and variance over [burn_in, end].
inline StationaryMoments stationary_moments(const Trajectory& traj, double burn_in, double relaxation_time = 0.0) {
  RunningMoments acc;
  accumulate_window(traj, burn_in, acc);
  if (acc.empty()) throw DegenerateStatistics("stationary_moments: empty post-burn-in window");
  StationaryMoments out;
  out.mean = acc.mean();
  out.variance = acc.variance();
  out.window = traj.end_time() - std::max(burn_in, traj.times.front());
  if (relaxation_time > 0.0) out.short_window = out.window < 10.0 * relaxation_time;
  return out;
}

/// Value held at time t (left-continuous lookup).
inline double sample_at(const Trajectory& traj, double t) {
  detail::require(!traj.empty(), "sample_at: empty trajectory");
  auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  if (it == traj.times.begin()) return traj.values.front();
  return traj.values[static_cast<std::size_t>(std::distance(traj.times.begin(), it)) - 1];
}

/// Cross-replica mean/variance at a fixed time.
inline StationaryMoments ensemble_moments(std::span<const Trajectory> replicas, double t) {
  RunningMoments acc;
  for (const auto& traj : replicas) acc.add(sample_at(traj, t));
  if (acc.empty()) throw DegenerateStatistics("ensemble_moments: no replicas");
  return {acc.mean(), acc.variance(), 0.0, false};
}

namespace detail {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// CSV with header `t,x`. Jump paths print integer counts.
inline void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x\n";
  const bool integral = traj.kind == TrajectoryKind::jump_process;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << detail::format_real(traj.times[i]) << ',';
    if (integral)
      out << static_cast<long long>(traj.values[i]);
    else
      out << detail::format_real(traj.values[i]);
    out << '\n';
  }
}

/// Event-level export of a jump path: `t,event` with event in {birth, death}.
/// The closing stamp of the window is not an event and is skipped.
inline void write_events_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,event\n";
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = traj.values[i] - traj.values[i - 1];
    if (d == 0.0) continue;
    out << detail::format_real(traj.times[i]) << ',' << (d > 0 ? "birth" : "death") << '\n';
  }
}

}  // namespace ratecost
