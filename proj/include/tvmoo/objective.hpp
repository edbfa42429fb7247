#pragma once

#include "tvmoo/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

namespace tvmoo {

/// Explicit coefficients of f(x) = 1/2 x'Ax + b'x + c, when f is quadratic.
struct QuadraticData {
  Matrix A;
  Vector b;
  double c = 0.0;
};

/// Differentiable convex f with L-Lipschitz gradient.
struct SmoothTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
  /// Set by the quadratic builders; lets oracles solve and sum exactly.
  std::optional<QuadraticData> quadratic;
};

/// Structural tag of a nonsmooth term. Oracles use it to decide whether a
/// sum of terms is again a term with a closed-form prox.
struct ProxFamily {
  enum class Kind { zero, l1, box, custom };
  Kind kind = Kind::custom;
  double lambda = 0.0;  // l1 weight
  double lo = 0.0;      // box bounds
  double hi = 0.0;
};

/// Proper lsc convex g with an exact proximal map.
struct ProxTerm {
  std::function<ExtendedReal(const Vector&)> value;
  /// prox(v, c) = argmin_x 1/2 |x - v|^2 + c g(x)
  std::function<Vector(const Vector&, double)> prox;
  /// Exact d(0, smooth_grad + dg(x)) given the smooth gradient at x.
  std::function<double(const Vector& x, const Vector& smooth_grad)> subdiff_distance;
  ProxFamily family;
};

/// phi = f + g.
struct CompositeObjective {
  SmoothTerm smooth;
  ProxTerm nonsmooth;

  ExtendedReal value(const Vector& x) const {
    const ExtendedReal g = nonsmooth.value(x);
    if (!g.is_finite()) return g;
    return smooth.value(x) + g;
  }
};

/// Time-indexed family t -> (phi_{1,t}, ..., phi_{N,t}) over R^n, t = 1..horizon.
class ObjectiveStream {
 public:
  using Generator = std::function<std::vector<CompositeObjective>(int)>;

  ObjectiveStream(int dim, int count, int horizon, Generator gen)
      : dim_(dim), count_(count), horizon_(horizon), gen_(std::move(gen)) {
    if (dim <= 0 || count <= 0 || horizon <= 0)
      throw ConfigError("objective stream needs positive dimension, count and horizon");
  }

  int dim() const { return dim_; }
  int count() const { return count_; }
  int horizon() const { return horizon_; }

  std::vector<CompositeObjective> at(int t) const {
    if (t < 1 || t > horizon_) {
      std::ostringstream os;
      os << "time index " << t << " outside 1.." << horizon_;
      throw ConfigError(os.str());
    }
    auto objs = gen_(t);
    if (static_cast<int>(objs.size()) != count_) {
      std::ostringstream os;
      os << "stream yielded " << objs.size() << " objectives at t=" << t << ", expected " << count_;
      throw ConfigError(os.str());
    }
    return objs;
  }

 private:
  int dim_;
  int count_;
  int horizon_;
  Generator gen_;
};

/// Step scale 0 < c <= 1/L (any c > 0 when L == 0). Relative slack 1e-12
/// absorbs the rounding in c = 1/L.
inline void require_step_scale(double c, double lipschitz) {
  const bool ok = c > 0.0 && std::isfinite(c) && (lipschitz <= 0.0 || c * lipschitz <= 1.0 + 1e-12);
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << "step scale C=" << c << " outside (0, 1/L] for L=" << lipschitz;
    throw ContractError(os.str());
  }
}

/// Result of one forward-backward step: T(x) and G(x) = (x - T(x)) / c.
struct ProxGradStep {
  Vector point;
  Vector gradient_mapping;
};

/// T(x) = prox_{c g}(x - c grad f(x)).
inline ProxGradStep prox_grad_map(const CompositeObjective& obj, const Vector& x, double c) {
  require_step_scale(c, obj.smooth.lipschitz);
  Vector forward = x - c * obj.smooth.gradient(x);
  Vector tx = obj.nonsmooth.prox(forward, c);
  Vector gx = (x - tx) / c;
  return {std::move(tx), std::move(gx)};
}

/// d(0, dphi(x)); `surrogate` marks the |G(x)| fallback.
struct SubdiffDistance {
  double value = 0.0;
  bool surrogate = false;
};

inline SubdiffDistance subdiff_distance(const CompositeObjective& obj, const Vector& x) {
  if (!obj.nonsmooth.value(x).is_finite()) throw DomainError("point outside the domain of the nonsmooth term");
  if (obj.nonsmooth.subdiff_distance) {
    return {obj.nonsmooth.subdiff_distance(x, obj.smooth.gradient(x)), false};
  }
  const double c = obj.smooth.lipschitz > 0.0 ? 1.0 / obj.smooth.lipschitz : 1.0;
  return {prox_grad_map(obj, x, c).gradient_mapping.norm(), true};
}

/// Sampled check of a declared gradient Lipschitz constant. Draws `pairs`
/// point pairs uniformly in [-radius, radius]^n and returns the largest
/// observed ratio |grad(x) - grad(y)| / |x - y|. Throws ContractError if
/// that ratio exceeds the declared constant by more than 1e-9 relative.
inline double validate_lipschitz(const SmoothTerm& f, int dim, std::uint64_t seed, int pairs = 1000,
                                 double radius = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  auto draw = [&] {
    Vector v(dim);
    for (int j = 0; j < dim; ++j) v[j] = unif(rng);
    return v;
  };
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const Vector x = draw();
    const Vector y = draw();
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    worst = std::max(worst, (f.gradient(x) - f.gradient(y)).norm() / dist);
  }
  if (worst > f.lipschitz * (1.0 + 1e-9)) {
    std::ostringstream os;
    os.precision(17);
    os << "declared Lipschitz constant " << f.lipschitz << " violated by sampled ratio " << worst;
    throw ContractError(os.str());
  }
  return worst;
}

}  // namespace tvmoo
