#pragma once

#include "tvmoo/objective.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <sstream>
#include <vector>

namespace tvmoo {

/// f(x) = 1/2 x'Ax + b'x + c with A symmetric PSD; L = lambda_max(A).
inline SmoothTerm quadratic_term(const QuadraticData& q) {
  const Eigen::Index n = q.A.rows();
  if (q.A.cols() != n || q.b.size() != n) throw ContractError("quadratic: A must be n x n and b of length n");
  const double scale = std::max(1.0, q.A.cwiseAbs().maxCoeff());
  if ((q.A - q.A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractError("quadratic: A is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.A, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < -1e-12 * scale) {
    std::ostringstream os;
    os << "quadratic: A is indefinite (smallest eigenvalue " << lo << ")";
    throw ContractError(os.str());
  }

  SmoothTerm f;
  f.value = [A = q.A, b = q.b, c = q.c](const Vector& x) { return 0.5 * x.dot(A * x) + b.dot(x) + c; };
  f.gradient = [A = q.A, b = q.b](const Vector& x) -> Vector { return A * x + b; };
  f.lipschitz = std::max(0.0, hi);
  f.quadratic = q;
  return f;
}

/// Coefficients of x -> base(x - shift).
inline QuadraticData shift_quadratic(const QuadraticData& base, const Vector& shift) {
  QuadraticData q;
  q.A = base.A;
  q.b = base.b - base.A * shift;
  q.c = base.c + 0.5 * shift.dot(base.A * shift) - base.b.dot(shift);
  return q;
}

/// Time-varying quadratic f_t for t = 1..horizon. Each f_t, including its
/// Lipschitz constant, is built once at construction.
class QuadraticFamily {
 public:
  using Drift = std::function<QuadraticData(int t, const QuadraticData& base)>;

  QuadraticFamily(const QuadraticData& base, const Drift& drift, int horizon) {
    terms_.reserve(static_cast<std::size_t>(horizon));
    for (int t = 1; t <= horizon; ++t) terms_.push_back(quadratic_term(drift ? drift(t, base) : base));
  }

  const SmoothTerm& at(int t) const { return terms_.at(static_cast<std::size_t>(t - 1)); }
  int horizon() const { return static_cast<int>(terms_.size()); }

 private:
  std::vector<SmoothTerm> terms_;
};

inline QuadraticFamily make_quadratic(const QuadraticData& base, const QuadraticFamily::Drift& drift,
                                      int horizon) {
  return QuadraticFamily(base, drift, horizon);
}

}  // namespace tvmoo
