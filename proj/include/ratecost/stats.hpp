#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace ratecost {

/// Weighted streaming mean/variance (West's update). Weights are durations for
/// time averages and 1 for sample averages.
class RunningMoments {
 public:
  void add(double x, double weight = 1.0) {
    if (weight <= 0.0) return;
    ++count_;
    const double total = weight_ + weight;
    const double delta = x - mean_;
    const double r = delta * weight / total;
    mean_ += r;
    m2_ += weight_ * delta * r;
    weight_ = total;
  }

  /// Chan's pairwise combination. Merging in a fixed order gives fixed bits.
  void merge(const RunningMoments& other) {
    if (other.weight_ <= 0.0) return;
    if (weight_ <= 0.0) {
      *this = other;
      return;
    }
    const double total = weight_ + other.weight_;
    const double delta = other.mean_ - mean_;
    mean_ += delta * other.weight_ / total;
    m2_ += other.m2_ + delta * delta * weight_ * other.weight_ / total;
    weight_ = total;
    count_ += other.count_;
  }

  std::size_t count() const { return count_; }
  double weight() const { return weight_; }
  bool empty() const { return weight_ <= 0.0; }
  double mean() const { return empty() ? std::numeric_limits<double>::quiet_NaN() : mean_; }
  /// Population (time-weighted) variance.
  double variance() const { return empty() ? std::numeric_limits<double>::quiet_NaN() : m2_ / weight_; }

 private:
  std::size_t count_ = 0;
  double weight_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Streaming covariance of a pair, equal weights.
class RunningCovariance {
 public:
  void add(double x, double y) {
    ++n_;
    const double dx = x - mean_x_;
    mean_x_ += dx / static_cast<double>(n_);
    const double dy = y - mean_y_;
    mean_y_ += dy / static_cast<double>(n_);
    cxy_ += dx * (y - mean_y_);
    cxx_ += dx * (x - mean_x_);
    cyy_ += dy * (y - mean_y_);
  }

  void merge(const RunningCovariance& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double dx = o.mean_x_ - mean_x_;
    const double dy = o.mean_y_ - mean_y_;
    const double f = static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    cxx_ += o.cxx_ + dx * dx * f;
    cyy_ += o.cyy_ + dy * dy * f;
    cxy_ += o.cxy_ + dx * dy * f;
    mean_x_ += dx * static_cast<double>(o.n_) / n;
    mean_y_ += dy * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }
  double correlation() const {
    const double denom = std::sqrt(cxx_ * cyy_);
    return denom > 0.0 ? cxy_ / denom : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  std::size_t n_ = 0;
  double mean_x_ = 0.0, mean_y_ = 0.0;
  double cxx_ = 0.0, cyy_ = 0.0, cxy_ = 0.0;
};

}  // namespace ratecost
