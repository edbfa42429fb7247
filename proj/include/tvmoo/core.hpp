#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace tvmoo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Violated precondition of an operation (bad step scale, bad weights, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point outside the effective domain of an extended-real function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent run configuration (horizon, dimensions, step sizes).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Objective combination that the oracles cannot reduce to a single composite.
class UnsupportedScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solve that ran out of iterations; keeps the best point found.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Vector best, double residual)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}

  const Vector& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  Vector best_;
  double residual_;
};

/// Value in (-inf, +inf]. The +inf state is a flag, never a sentinel float,
/// so indicator functions keep exact domain semantics.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit on purpose

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }

  double value() const {
    if (infinite_) throw DomainError("extended real is +inf");
    return value_;
  }

  /// Finite value, or +inf as a double (for printing and comparisons only).
  double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return {a.value_ + b.value_};
  }

  /// Nonnegative scaling; 0 * (+inf) is taken as +inf (indicator semantics).
  friend ExtendedReal operator*(double s, ExtendedReal a) {
    if (a.infinite_) return infinity();
    return {s * a.value_};
  }

  friend bool operator<=(ExtendedReal a, ExtendedReal b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Additive slack shared by every inequality verdict.
inline double verdict_tolerance(double lhs, double rhs) {
  return 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

}  // namespace tvmoo
