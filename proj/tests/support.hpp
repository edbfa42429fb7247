#pragma once

#include "tvmoo/tvmoo.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace tvmoo::test {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

/// a/2 (x - center)^2 in one dimension.
inline SmoothTerm scalar_quadratic(double a, double center) {
  QuadraticData q{Matrix::Constant(1, 1, a), Vector::Constant(1, -a * center), 0.5 * a * center * center};
  return quadratic_term(q);
}

inline CompositeObjective composite(SmoothTerm f, ProxTerm g = zero_term()) { return {std::move(f), std::move(g)}; }

inline ObjectiveStream constant_stream(std::vector<CompositeObjective> objs, int horizon) {
  const int dim = static_cast<int>(objs.front().smooth.gradient(Vector::Zero(1)).size());
  const int count = static_cast<int>(objs.size());
  return ObjectiveStream(dim, count, horizon, [objs = std::move(objs)](int) { return objs; });
}

/// Brute-force 1-D minimizer of h on [lo, hi] by a uniform grid followed by
/// golden-section refinement around the best node.
inline double grid_argmin(const std::function<double(double)>& h, double lo, double hi, int nodes = 20001) {
  double best = lo, best_val = h(lo);
  const double step = (hi - lo) / (nodes - 1);
  for (int k = 1; k < nodes; ++k) {
    const double x = lo + k * step;
    if (const double v = h(x); v < best_val) best = x, best_val = v;
  }
  double a = best - step, b = best + step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (h(c) <= h(d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

inline std::string scenario_path(const char* file) { return std::string(TVMOO_SCENARIO_DIR) + "/" + file; }

}  // namespace tvmoo::test
