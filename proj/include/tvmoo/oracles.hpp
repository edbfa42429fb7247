#pragma once

#include "tvmoo/prox_terms.hpp"
#include "tvmoo/quadratic.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

namespace tvmoo {

struct OfflineSolution {
  Vector point;
  double residual = 0.0;
  bool surrogate = false;
};

/// Minimizes phi by forward-backward iterations with c = 1/L until
/// d(0, dphi(x)) <= tol. Quadratics with g == 0 go through a direct solve
/// first and only iterate if that leaves a residual above tol.
inline OfflineSolution solve_offline(const CompositeObjective& obj, const Vector& x0, double tol = 1e-10,
                                     long max_iters = 2'000'000) {
  if (!(tol > 0.0)) throw ContractError("solve_offline: tol must be positive");
  const double c = obj.smooth.lipschitz > 0.0 ? 1.0 / obj.smooth.lipschitz : 1.0;

  Vector x = x0;
  if (obj.nonsmooth.family.kind == ProxFamily::Kind::zero && obj.smooth.quadratic) {
    const auto& q = *obj.smooth.quadratic;
    Eigen::LDLT<Matrix> ldlt(q.A);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Vector direct = ldlt.solve(-q.b);
      if (direct.allFinite()) x = std::move(direct);
    }
  }
  if (!obj.nonsmooth.value(x).is_finite()) x = obj.nonsmooth.prox(x, c);

  SubdiffDistance res = subdiff_distance(obj, x);
  Vector best = x;
  double best_res = res.value;
  for (long it = 0; it < max_iters && res.value > tol; ++it) {
    x = prox_grad_map(obj, x, c).point;
    res = subdiff_distance(obj, x);
    if (res.value < best_res) {
      best_res = res.value;
      best = x;
    }
  }
  if (best_res > tol) {
    std::ostringstream os;
    os.precision(6);
    os << "offline solve stopped after " << max_iters << " iterations with residual " << best_res;
    throw ConvergenceError(os.str(), best, best_res);
  }
  return {best, best_res, res.surrogate};
}

/// g scaled by w > 0: prox_{c (w g)} = prox_{(c w) g}.
inline ProxTerm scale_prox_term(const ProxTerm& g, double w) {
  ProxTerm s;
  s.value = [g, w](const Vector& x) { return w * g.value(x); };
  s.prox = [g, w](const Vector& v, double c) { return g.prox(v, c * w); };
  if (g.subdiff_distance) {
    // d(0, grad + w dg) = w d(0, grad / w + dg)
    s.subdiff_distance = [g, w](const Vector& x, const Vector& grad) {
      return w * g.subdiff_distance(x, grad / w);
    };
  }
  s.family = g.family;
  s.family.lambda *= w;
  return s;
}

/// sum_k w_k g_k when the result stays inside a builtin family: zero terms
/// vanish, l1 weights add, boxes intersect, and a lone custom term scales.
inline ProxTerm combine_prox_terms(const std::vector<ProxTerm>& terms, std::span<const double> weights) {
  std::vector<std::pair<const ProxTerm*, double>> active;
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (weights[k] > 0.0 && terms[k].family.kind != ProxFamily::Kind::zero) active.emplace_back(&terms[k], weights[k]);
  if (active.empty()) return zero_term();

  const auto kind = active.front().first->family.kind;
  const bool uniform = std::all_of(active.begin(), active.end(), [&](auto& p) { return p.first->family.kind == kind; });
  if (!uniform) throw UnsupportedScenario("nonsmooth terms of different families do not sum to a builtin family");

  switch (kind) {
    case ProxFamily::Kind::l1: {
      double lambda = 0.0;
      for (auto& [g, w] : active) lambda += w * g->family.lambda;
      return l1_term(lambda);
    }
    case ProxFamily::Kind::box: {
      double lo = active.front().first->family.lo;
      double hi = active.front().first->family.hi;
      for (auto& [g, w] : active) {
        lo = std::max(lo, g->family.lo);
        hi = std::min(hi, g->family.hi);
      }
      if (lo > hi) throw UnsupportedScenario("box constraints have an empty intersection");
      return box_term(lo, hi);
    }
    case ProxFamily::Kind::custom:
      if (active.size() == 1) return scale_prox_term(*active.front().first, active.front().second);
      throw UnsupportedScenario("sums of custom nonsmooth terms have no known prox");
    case ProxFamily::Kind::zero: break;
  }
  return zero_term();
}

/// sum_k w_k f_k; stays quadratic (and exact) when every f_k is.
inline SmoothTerm combine_smooth_terms(const std::vector<SmoothTerm>& terms, std::span<const double> weights) {
  const bool all_quadratic = std::all_of(terms.begin(), terms.end(), [](const SmoothTerm& f) { return f.quadratic.has_value(); });
  if (all_quadratic && !terms.empty()) {
    QuadraticData q{Matrix::Zero(terms[0].quadratic->A.rows(), terms[0].quadratic->A.cols()),
                    Vector::Zero(terms[0].quadratic->b.size()), 0.0};
    for (std::size_t k = 0; k < terms.size(); ++k) {
      q.A += weights[k] * terms[k].quadratic->A;
      q.b += weights[k] * terms[k].quadratic->b;
      q.c += weights[k] * terms[k].quadratic->c;
    }
    return quadratic_term(q);
  }
  SmoothTerm s;
  std::vector<double> w(weights.begin(), weights.end());
  s.value = [terms, w](const Vector& x) {
    double v = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) v += w[k] * terms[k].value(x);
    return v;
  };
  s.gradient = [terms, w](const Vector& x) {
    Vector gsum = Vector::Zero(x.size());
    for (std::size_t k = 0; k < terms.size(); ++k) gsum += w[k] * terms[k].gradient(x);
    return gsum;
  };
  for (std::size_t k = 0; k < terms.size(); ++k) s.lipschitz += w[k] * terms[k].lipschitz;
  return s;
}

inline CompositeObjective combine_objectives(const std::vector<CompositeObjective>& objs, std::span<const double> weights) {
  std::vector<SmoothTerm> fs;
  std::vector<ProxTerm> gs;
  for (const auto& o : objs) {
    fs.push_back(o.smooth);
    gs.push_back(o.nonsmooth);
  }
  return {combine_smooth_terms(fs, weights), combine_prox_terms(gs, weights)};
}

/// Per (t, i) minimizer of phi_{i,t}, its value and the solve residual.
struct OptimumEntry {
  Vector point;
  double value = 0.0;
  double residual = 0.0;
};

struct OptimumTrace {
  std::vector<std::vector<OptimumEntry>> entries;  // [t-1][i]
  double tolerance = 1e-10;
  bool surrogate_residuals = false;

  int horizon() const { return static_cast<int>(entries.size()); }
  const OptimumEntry& at(int t, int i) const {
    return entries.at(static_cast<std::size_t>(t - 1)).at(static_cast<std::size_t>(i));
  }
};

/// Solves every phi_{i,t}, t = 1..horizon, warm-starting each i from its
/// previous optimum. Convergence failures name the offending (i, t).
inline OptimumTrace compute_optimum_trace(const ObjectiveStream& stream, int horizon, double tol = 1e-10) {
  OptimumTrace trace;
  trace.tolerance = tol;
  std::vector<Vector> warm(static_cast<std::size_t>(stream.count()), Vector::Zero(stream.dim()));
  for (int t = 1; t <= horizon; ++t) {
    const auto objs = stream.at(t);
    std::vector<OptimumEntry> row;
    for (int i = 0; i < stream.count(); ++i) {
      const auto& obj = objs[static_cast<std::size_t>(i)];
      OfflineSolution sol;
      try {
        sol = solve_offline(obj, warm[static_cast<std::size_t>(i)], tol);
      } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << "oracle for objective " << i + 1 << " at t=" << t << ": " << e.what();
        throw ConvergenceError(os.str(), e.best(), e.residual());
      }
      trace.surrogate_residuals = trace.surrogate_residuals || sol.surrogate;
      warm[static_cast<std::size_t>(i)] = sol.point;
      row.push_back({sol.point, obj.value(sol.point).value(), sol.residual});
    }
    trace.entries.push_back(std::move(row));
  }
  return trace;
}

/// argmin_x sum_{t=1}^{horizon} phi_{i,t}(x); i is zero-based.
inline Vector static_optimum(const ObjectiveStream& stream, int i, int horizon, double tol = 1e-10) {
  std::vector<CompositeObjective> per_t;
  for (int t = 1; t <= horizon; ++t) per_t.push_back(stream.at(t).at(static_cast<std::size_t>(i)));
  const std::vector<double> ones(per_t.size(), 1.0);
  const auto total = combine_objectives(per_t, ones);
  return solve_offline(total, Vector::Zero(stream.dim()), tol).point;
}

/// argmin_x sum_i omega_i phi_i(x), iterating from x0 when no direct solve applies.
inline Vector solve_scalarized(const std::vector<CompositeObjective>& objs, std::span<const double> omegas,
                               const Vector& x0, double tol = 1e-10) {
  if (omegas.size() != objs.size()) throw ContractError("scalarization: one weight per objective required");
  double sum = 0.0;
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) throw ContractError("scalarization: weights must lie in [0, 1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ContractError("scalarization: weights must sum to 1");
  return solve_offline(combine_objectives(objs, omegas), x0, tol).point;
}

/// a <= b componentwise with a_j < b_j for some j. No tolerance.
inline bool pareto_dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("dominance: value vectors of different length");
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

/// a dominates b even after a is worsened by `margin` in every component.
inline bool pareto_dominates_by(std::span<const double> a, std::span<const double> b, double margin) {
  std::vector<double> shifted(a.begin(), a.end());
  for (double& v : shifted) v += margin;
  return pareto_dominates(shifted, b);
}

struct FrontPoint {
  Vector x;
  std::vector<double> values;
};

inline std::vector<double> objective_values(const std::vector<CompositeObjective>& objs, const Vector& x) {
  std::vector<double> v;
  v.reserve(objs.size());
  for (const auto& o : objs) v.push_back(o.value(x).as_double());
  return v;
}

/// Nondominated points of the uniform grid over [lo, hi]^n (n <= 2,
/// `resolution` points per axis).
inline std::vector<FrontPoint> grid_pareto_front(const std::vector<CompositeObjective>& objs, int dim, double lo,
                                                 double hi, int resolution) {
  if (dim < 1 || dim > 2) throw UnsupportedScenario("grid Pareto front supports n = 1 or n = 2 only");
  if (resolution < 2 || resolution > 401) throw ContractError("grid resolution must lie in 2..401");
  if (!(lo < hi)) throw ContractError("grid box needs lo < hi");

  const double h = (hi - lo) / (resolution - 1);
  auto coord = [&](int k) { return k == resolution - 1 ? hi : lo + k * h; };
  std::vector<FrontPoint> grid;
  const int ny = dim == 2 ? resolution : 1;
  grid.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(ny));
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < ny; ++b) {
      Vector x(dim);
      x[0] = coord(a);
      if (dim == 2) x[1] = coord(b);
      auto vals = objective_values(objs, x);
      grid.push_back({std::move(x), std::move(vals)});
    }
  }

  // Any dominator precedes its victim in lexicographic value order, and
  // dominance is transitive, so comparing against the front so far suffices.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return grid[p].values < grid[q].values; });
  std::vector<std::size_t> front;
  for (std::size_t p : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t q) {
      return pareto_dominates(grid[q].values, grid[p].values);
    });
    if (!dominated) front.push_back(p);
  }
  std::sort(front.begin(), front.end());
  std::vector<FrontPoint> out;
  out.reserve(front.size());
  for (std::size_t p : front) out.push_back(std::move(grid[p]));
  return out;
}

/// Central differences, one coordinate at a time.
inline Vector finite_diff_gradient(const SmoothTerm& f, const Vector& x, double h = 1e-5) {
  if (!(h > 0.0)) throw ContractError("finite differences need h > 0");
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    const double up = f.value(xp);
    xp[j] = x[j] - h;
    const double down = f.value(xp);
    xp[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace tvmoo
