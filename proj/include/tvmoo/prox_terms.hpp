#pragma once

#include "tvmoo/objective.hpp"

#include <cmath>
#include <sstream>

namespace tvmoo {

inline ProxTerm zero_term() {
  ProxTerm g;
  g.value = [](const Vector&) { return ExtendedReal(0.0); };
  g.prox = [](const Vector& v, double) { return v; };
  g.subdiff_distance = [](const Vector&, const Vector& grad) { return grad.norm(); };
  g.family = {ProxFamily::Kind::zero, 0.0, 0.0, 0.0};
  return g;
}

/// Soft threshold: sign(v) max(|v| - t, 0), coordinatewise.
inline Vector soft_threshold(const Vector& v, double t) {
  return v.array().sign() * (v.array().abs() - t).max(0.0);
}

/// lambda |x|_1.
inline ProxTerm l1_term(double lambda) {
  if (!(lambda >= 0.0)) throw ContractError("l1 weight must be nonnegative");
  ProxTerm g;
  g.value = [lambda](const Vector& x) { return ExtendedReal(lambda * x.lpNorm<1>()); };
  g.prox = [lambda](const Vector& v, double c) { return soft_threshold(v, c * lambda); };
  // dphi_j = grad_j + lambda sign(x_j) off zero, grad_j + [-lambda, lambda] at zero.
  g.subdiff_distance = [lambda](const Vector& x, const Vector& grad) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double d = x[j] != 0.0 ? std::abs(grad[j] + std::copysign(lambda, x[j]))
                                   : std::max(std::abs(grad[j]) - lambda, 0.0);
      sq += d * d;
    }
    return std::sqrt(sq);
  };
  g.family = {ProxFamily::Kind::l1, lambda, 0.0, 0.0};
  return g;
}

/// Indicator of [lo, hi]^n.
inline ProxTerm box_term(double lo, double hi) {
  if (!(lo <= hi)) {
    std::ostringstream os;
    os << "box needs lo <= hi, got [" << lo << ", " << hi << "]";
    throw ContractError(os.str());
  }
  ProxTerm g;
  g.value = [lo, hi](const Vector& x) {
    const bool inside = (x.array() >= lo).all() && (x.array() <= hi).all();
    return inside ? ExtendedReal(0.0) : ExtendedReal::infinity();
  };
  g.prox = [lo, hi](const Vector& v, double) -> Vector { return v.cwiseMax(lo).cwiseMin(hi); };
  // Normal cone: (-inf, 0] at lo, [0, inf) at hi, R when lo == hi, {0} inside.
  g.subdiff_distance = [lo, hi](const Vector& x, const Vector& grad) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      double d = 0.0;
      if (lo == hi) {
        d = 0.0;
      } else if (x[j] == lo) {
        d = std::max(0.0, -grad[j]);
      } else if (x[j] == hi) {
        d = std::max(0.0, grad[j]);
      } else {
        d = std::abs(grad[j]);
      }
      sq += d * d;
    }
    return std::sqrt(sq);
  };
  g.family = {ProxFamily::Kind::box, 0.0, lo, hi};
  return g;
}

/// Nonsmooth term described by a family tag (custom is rejected).
inline ProxTerm make_prox_term(const ProxFamily& fam) {
  switch (fam.kind) {
    case ProxFamily::Kind::zero: return zero_term();
    case ProxFamily::Kind::l1: return fam.lambda == 0.0 ? zero_term() : l1_term(fam.lambda);
    case ProxFamily::Kind::box: return box_term(fam.lo, fam.hi);
    case ProxFamily::Kind::custom: break;
  }
  throw UnsupportedScenario("custom nonsmooth terms have no builtin construction");
}

struct ProxCatalogEntry {
  const char* name;
  ProxTerm term;
};

/// One representative of each builtin family.
inline std::vector<ProxCatalogEntry> builtin_prox_terms(double lambda = 1.0, double lo = -1.0, double hi = 1.0) {
  return {{"zero", zero_term()}, {"l1", l1_term(lambda)}, {"box", box_term(lo, hi)}};
}

}  // namespace tvmoo
