#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace ratecost {

/// Explicit RNG handle. One instance per replica; never shared between threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream `index` of the family rooted at `master`. Streams of one family are
  /// independent of each other and of scheduling order.
  static RandomStream derive(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    RandomStream out(0);
    out.engine_.seed(seq);
    return out;
  }

  double normal() { return normal_(engine_); }
  double normal(double mean, double variance) { return mean + std::sqrt(variance) * normal_(engine_); }

  /// Uniform on (0, 1]; safe to take the log of.
  double uniform_positive() { return 1.0 - uniform_(engine_); }

  double exponential(double rate) { return -std::log(uniform_positive()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace ratecost
