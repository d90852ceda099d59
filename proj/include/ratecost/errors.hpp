#pragma once

#include <stdexcept>
#include <string>

namespace ratecost {

/// A control policy emitted a sample outside the admissible set (e.g. mu > mu_max).
class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A path or integrand produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filter covariance or state left the finite range.
class NumericalDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimator denominator vanished (E[X] = 0, E[mu X] = 0, empty window).
class DegenerateStatistics : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested estimator is not valid for the given run.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace detail
}  // namespace ratecost
