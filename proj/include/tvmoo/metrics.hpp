#pragma once

#include "tvmoo/engine.hpp"
#include "tvmoo/oracles.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tvmoo {

/// Both sides of one inequality lhs <= rhs, judged with verdict_tolerance.
struct Verdict {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  double slack = 0.0;  // rhs - lhs
};

inline Verdict make_verdict(double lhs, double rhs) {
  Verdict v{lhs, rhs, true, rhs - lhs};
  if (std::isinf(rhs) && rhs > 0) return v;
  if (std::isinf(lhs) && lhs < 0) return v;
  v.satisfied = lhs <= rhs + verdict_tolerance(lhs, rhs);
  return v;
}

// ---------------------------------------------------------------------------
// Regret

/// phi_{i,t}(x^t) - phi_{i,t}(x^{opt,t,i}) for t = 1..T.
inline std::vector<double> per_step_gaps(const Trajectory& traj, const ObjectiveStream& stream,
                                         const OptimumTrace& trace, int i) {
  const int T = traj.horizon();
  if (trace.horizon() < T) throw ConfigError("optimum trace shorter than the trajectory");
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    const auto objs = stream.at(t);
    gaps.push_back(objs.at(static_cast<std::size_t>(i)).value(traj.x(t)).as_double() - trace.at(t, i).value);
  }
  return gaps;
}

inline double dynamic_regret(const Trajectory& traj, const ObjectiveStream& stream, const OptimumTrace& trace, int i) {
  double sum = 0.0;
  for (double g : per_step_gaps(traj, stream, trace, i)) sum += g;
  return sum;
}

/// sum_t phi_{i,t}(x^t) - min_x sum_t phi_{i,t}(x).
inline double static_regret(const Trajectory& traj, const ObjectiveStream& stream, int i, double tol = 1e-10) {
  const int T = traj.horizon();
  const Vector best = static_optimum(stream, i, T, tol);
  double sum = 0.0;
  for (int t = 1; t <= T; ++t) {
    const CompositeObjective obj = stream.at(t).at(static_cast<std::size_t>(i));
    sum += obj.value(traj.x(t)).as_double() - obj.value(best).as_double();
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Path lengths

/// Cumulative v_t, w_t, sigma_t for t = 1..T (index t-1).
struct PathLengths {
  std::vector<double> v;
  std::vector<double> w;
  std::vector<double> sigma;
  /// [t-1][i]: the sigma term for (i, t) used the |G| fallback.
  std::vector<std::vector<bool>> sigma_surrogate;
  bool any_surrogate = false;
};

/// v_t = sum_{s<=t} |x^{s+1} - x^s|;
/// w_t = sum_{j<=t} max_i |x^{opt,j+1,i} - x^{opt,j,i}|, with terms whose
///       j+1 lies beyond the optimum trace omitted;
/// sigma_t = sum_{j<=t} sum_i d(0, dphi_{i,j}(x^j)).
inline PathLengths path_lengths(const Trajectory& traj, const ObjectiveStream& stream, const OptimumTrace& trace) {
  const int T = traj.horizon();
  const int N = stream.count();
  PathLengths pl;
  double v = 0.0, w = 0.0, s = 0.0;
  for (int t = 1; t <= T; ++t) {
    v += (traj.x(t + 1) - traj.x(t)).norm();
    if (t + 1 <= trace.horizon()) {
      double m = 0.0;
      for (int i = 0; i < N; ++i) m = std::max(m, (trace.at(t + 1, i).point - trace.at(t, i).point).norm());
      w += m;
    }
    const auto objs = stream.at(t);
    std::vector<bool> flags;
    for (int i = 0; i < N; ++i) {
      const auto d = subdiff_distance(objs[static_cast<std::size_t>(i)], traj.x(t));
      s += d.value;
      flags.push_back(d.surrogate);
      pl.any_surrogate = pl.any_surrogate || d.surrogate;
    }
    pl.v.push_back(v);
    pl.w.push_back(w);
    pl.sigma.push_back(s);
    pl.sigma_surrogate.push_back(std::move(flags));
  }
  return pl;
}

/// Running v_t and sigma_t fed by the engine's observer hook, in t order.
class StreamingPathLengths {
 public:
  explicit StreamingPathLengths(const ObjectiveStream& stream) : stream_(&stream) {}

  StepObserver observer() {
    return [this](int t, const Vector& xt, const Vector& xnext, const TimeStepResult&) {
      v_ += (xnext - xt).norm();
      for (const auto& obj : stream_->at(t)) sigma_ += subdiff_distance(obj, xt).value;
      v_seq_.push_back(v_);
      sigma_seq_.push_back(sigma_);
    };
  }

  const std::vector<double>& v() const { return v_seq_; }
  const std::vector<double>& sigma() const { return sigma_seq_; }

 private:
  const ObjectiveStream* stream_;
  double v_ = 0.0;
  double sigma_ = 0.0;
  std::vector<double> v_seq_;
  std::vector<double> sigma_seq_;
};

// ---------------------------------------------------------------------------
// Slow-change constant

struct DriftEstimate {
  ExtendedReal e = 0.0;
  /// Some g_{i,t} was +inf at an iterate, so no finite e exists.
  bool violated = false;
  int worst_t = 0;
  int worst_i = 0;
};

/// e = max_{t, i} max(|f_{i,t}(x^{t+1}) - f_{i,t}(x^t)|, |g_{i,t}(x^{t+1}) - g_{i,t}(x^t)|), t = 1..T.
inline DriftEstimate drift_bound(const Trajectory& traj, const ObjectiveStream& stream) {
  DriftEstimate d;
  double e = 0.0;
  for (int t = 1; t <= traj.horizon(); ++t) {
    const auto objs = stream.at(t);
    for (int i = 0; i < stream.count(); ++i) {
      const auto& o = objs[static_cast<std::size_t>(i)];
      const ExtendedReal g0 = o.nonsmooth.value(traj.x(t));
      const ExtendedReal g1 = o.nonsmooth.value(traj.x(t + 1));
      if (!g0.is_finite() || !g1.is_finite()) {
        d.e = ExtendedReal::infinity();
        d.violated = true;
        d.worst_t = t;
        d.worst_i = i;
        return d;
      }
      const double df = std::abs(o.smooth.value(traj.x(t + 1)) - o.smooth.value(traj.x(t)));
      const double dg = std::abs(g1.value() - g0.value());
      if (std::max(df, dg) > e) {
        e = std::max(df, dg);
        d.worst_t = t;
        d.worst_i = i;
      }
    }
  }
  d.e = e;
  return d;
}

// ---------------------------------------------------------------------------
// Single-step inequality

struct Lemma1Check {
  Verdict bound;
  bool descent = true;  // phi(T(x)) <= phi(x) + 1e-12
};

/// phi(T(x)) - phi(y) <= (|x - y|^2 - |T(x) - y|^2) / (2c), plus phi(T(x)) <= phi(x).
inline Lemma1Check check_lemma1(const CompositeObjective& obj, const Vector& x, const Vector& y, double c) {
  const Vector tx = prox_grad_map(obj, x, c).point;
  const ExtendedReal phi_tx = obj.value(tx);
  const ExtendedReal phi_y = obj.value(y);
  const ExtendedReal phi_x = obj.value(x);
  const double rhs = ((x - y).squaredNorm() - (tx - y).squaredNorm()) / (2.0 * c);
  double lhs = 0.0;
  if (!phi_y.is_finite())
    lhs = -std::numeric_limits<double>::infinity();
  else
    lhs = phi_tx.as_double() - phi_y.value();
  Lemma1Check out;
  out.bound = make_verdict(lhs, rhs);
  out.descent = !phi_x.is_finite() || phi_tx.as_double() <= phi_x.value() + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// Distance bounds along a run

struct Lemma2Verdicts {
  std::vector<Verdict> a;                // [t-1]
  std::vector<std::vector<Verdict>> b;   // [t-1][i]
  std::vector<std::vector<Verdict>> c;   // [t-1][i]; empty when skipped
  bool c_skipped = false;
  bool surrogate = false;
};

/// (a) |x^{t+1} - x^t| <= K sigma_t
/// (b) |x^{t+1} - x^{opt,t,i}| <= 2 v_t + w_t + |x^1 - x^{opt,1,i}|
/// (c) |x^{t,K} - x^{opt,t,i}| <= 2 v_t + w_t + K sigma_t + |x^1 - x^{opt,1,i}|  (needs inner record)
inline Lemma2Verdicts check_lemma2(const Trajectory& traj, const OptimumTrace& trace, int K, const PathLengths& pl) {
  const int T = traj.horizon();
  const int N = static_cast<int>(trace.entries.front().size());
  Lemma2Verdicts out;
  out.surrogate = pl.any_surrogate;
  out.c_skipped = !traj.has_inner();
  for (int t = 1; t <= T; ++t) {
    const auto ti = static_cast<std::size_t>(t - 1);
    out.a.push_back(make_verdict((traj.x(t + 1) - traj.x(t)).norm(), K * pl.sigma[ti]));
    std::vector<Verdict> bs, cs;
    for (int i = 0; i < N; ++i) {
      const double start = (traj.x(1) - trace.at(1, i).point).norm();
      const double base = 2.0 * pl.v[ti] + pl.w[ti] + start;
      bs.push_back(make_verdict((traj.x(t + 1) - trace.at(t, i).point).norm(), base));
      if (!out.c_skipped) {
        const Vector& xk = traj.inner[ti].iterates[static_cast<std::size_t>(K)];
        cs.push_back(make_verdict((xk - trace.at(t, i).point).norm(), base + K * pl.sigma[ti]));
      }
    }
    out.b.push_back(std::move(bs));
    if (!out.c_skipped) out.c.push_back(std::move(cs));
  }
  return out;
}

/// |x^{t,k+1} - x^{t,k}| <= |x^{t,k} - x^{t,k-1}| for k = 1..K, every t.
inline std::vector<Verdict> check_inner_chain(const Trajectory& traj) {
  std::vector<Verdict> out;
  for (const auto& disp : traj.displacements)
    for (std::size_t k = 1; k < disp.size(); ++k) out.push_back(make_verdict(disp[k], disp[k - 1]));
  return out;
}

// ---------------------------------------------------------------------------
// Regret bounds

struct Theorem1Check {
  double rhs_stated = 0.0;   // (v_T + w_T + K sigma_T)^2 (sum_i |x^1 - x^{opt,1,i}| / (2 alpha C_i))^2
  double rhs_proof = 0.0;    // same with 2 v_T
  std::vector<Verdict> stated;       // per objective
  std::vector<Verdict> proof_variant;
  bool surrogate = false;
};

/// The squared-sum factor shared by the regret and gradient-gap bounds.
inline double theorem_weight_factor(double alpha_min, std::span<const double> steps, const Vector& x1,
                                    const OptimumTrace& trace) {
  double s = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i)
    s += (x1 - trace.at(1, static_cast<int>(i)).point).norm() / (2.0 * alpha_min * steps[i]);
  return s * s;
}

inline Theorem1Check check_theorem1(std::span<const double> regrets, const EngineConfig& config, const Vector& x1,
                                    const OptimumTrace& trace, const PathLengths& pl) {
  if (config.one_hot_index()) throw ContractError("one-hot weights: use check_corollary instead of check_theorem1");
  const double vT = pl.v.back(), wT = pl.w.back(), sT = pl.sigma.back();
  const double factor = theorem_weight_factor(config.alpha_min(), config.steps, x1, trace);
  Theorem1Check out;
  out.rhs_stated = (vT + wT + config.K * sT) * (vT + wT + config.K * sT) * factor;
  out.rhs_proof = (2.0 * vT + wT + config.K * sT) * (2.0 * vT + wT + config.K * sT) * factor;
  out.surrogate = pl.any_surrogate;
  for (double r : regrets) {
    out.stated.push_back(make_verdict(r, out.rhs_stated));
    out.proof_variant.push_back(make_verdict(r, out.rhs_proof));
  }
  return out;
}

struct CorollaryCheck {
  Verdict next_iterate;    // sum_t phi(x^{t+1}) - phi(opt) <= C/(K+1) |x^1 - x^{opt,1}|^2
  Verdict with_drift;      // sum_t phi(x^t) - phi(opt) <= T e + C/(K+1) |x^1 - x^{opt,1}|^2
  // Per-step variants with C/(T(K+1)) and an unsquared distance; reported only.
  Verdict per_step;        // max_t phi_t(x^{t+1}) - phi_t(opt)
  Verdict final_step;      // phi_T(x^T) - phi_T(opt) <= e + ...
};

/// One-hot weights only; the constant is max_i 1/C_i over the configured steps.
inline CorollaryCheck check_corollary(const Trajectory& traj, const ObjectiveStream& stream, const OptimumTrace& trace,
                                      const EngineConfig& config, const DriftEstimate& drift) {
  const auto hot = config.one_hot_index();
  if (!hot) throw ContractError("corollary bounds need one-hot weights");
  const int i = *hot;
  const int T = traj.horizon();
  double c_max = 0.0;
  for (double c : config.steps) c_max = std::max(c_max, 1.0 / c);
  const double dist = (traj.x(1) - trace.at(1, i).point).norm();
  const double e = drift.e.as_double();

  double sum_next = 0.0, sum_cur = 0.0, worst_next = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= T; ++t) {
    const CompositeObjective obj = stream.at(t).at(static_cast<std::size_t>(i));
    const double opt = trace.at(t, i).value;
    const double gap_next = obj.value(traj.x(t + 1)).as_double() - opt;
    sum_next += gap_next;
    sum_cur += obj.value(traj.x(t)).as_double() - opt;
    worst_next = std::max(worst_next, gap_next);
  }
  const double base = c_max / (config.K + 1) * dist * dist;
  const double box = c_max / (static_cast<double>(T) * (config.K + 1)) * dist;
  const double final_gap = stream.at(T).at(static_cast<std::size_t>(i)).value(traj.x(T)).as_double() - trace.at(T, i).value;

  CorollaryCheck out;
  out.next_iterate = make_verdict(sum_next, base);
  out.with_drift = make_verdict(sum_cur, T * e + base);
  out.per_step = make_verdict(worst_next, box);
  out.final_step = make_verdict(final_gap, e + box);
  return out;
}

/// |grad f_{i,t}(x^t) - grad f_{i,t}(x^{opt,t,i})|^2 <= 2 L * theorem_rhs, per [t-1][i].
inline std::vector<std::vector<Verdict>> check_proposition(const Trajectory& traj, const ObjectiveStream& stream,
                                                           const OptimumTrace& trace, double L, double theorem_rhs) {
  std::vector<std::vector<Verdict>> out;
  for (int t = 1; t <= traj.horizon(); ++t) {
    const auto objs = stream.at(t);
    std::vector<Verdict> row;
    for (int i = 0; i < stream.count(); ++i) {
      const auto& f = objs[static_cast<std::size_t>(i)].smooth;
      const double gap = (f.gradient(traj.x(t)) - f.gradient(trace.at(t, i).point)).squaredNorm();
      row.push_back(make_verdict(gap, 2.0 * L * theorem_rhs));
    }
    out.push_back(std::move(row));
  }
  return out;
}

/// max_{i,t} L_{f_{i,t}}.
inline double max_lipschitz(const ObjectiveStream& stream, int horizon) {
  double L = 0.0;
  for (int t = 1; t <= horizon; ++t)
    for (const auto& o : stream.at(t)) L = std::max(L, o.smooth.lipschitz);
  return L;
}

// ---------------------------------------------------------------------------
// Min-composite trace

struct MinCompositeTrace {
  std::vector<double> phi_at_iterate;       // phi_t(x^t) = min_i phi_{i,t}(x^t)
  std::vector<Vector> combined_optimum;     // x^{opt,t} = sum_i alpha_i x^{opt,t,i}
  std::vector<double> phi_at_combined;      // phi_t(x^{opt,t})
  std::vector<double> weighted_optimal_sum; // sum_i alpha_i phi_{i,t}(x^{opt,t,i})
};

inline MinCompositeTrace min_composite_trace(const Trajectory& traj, const ObjectiveStream& stream,
                                             std::span<const double> alphas, const OptimumTrace& trace) {
  MinCompositeTrace out;
  for (int t = 1; t <= traj.horizon(); ++t) {
    const auto objs = stream.at(t);
    Vector combined = Vector::Zero(stream.dim());
    double weighted = 0.0;
    for (int i = 0; i < stream.count(); ++i) {
      combined += alphas[static_cast<std::size_t>(i)] * trace.at(t, i).point;
      weighted += alphas[static_cast<std::size_t>(i)] * trace.at(t, i).value;
    }
    double at_x = std::numeric_limits<double>::infinity();
    double at_c = std::numeric_limits<double>::infinity();
    for (const auto& o : objs) {
      at_x = std::min(at_x, o.value(traj.x(t)).as_double());
      at_c = std::min(at_c, o.value(combined).as_double());
    }
    out.phi_at_iterate.push_back(at_x);
    out.combined_optimum.push_back(std::move(combined));
    out.phi_at_combined.push_back(at_c);
    out.weighted_optimal_sum.push_back(weighted);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

/// Worst instance of one bound over all (t, i) it was evaluated on.
struct BoundSummary {
  std::string name;
  bool skipped = false;
  bool surrogate = false;
  Verdict worst;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  bool satisfied() const { return skipped || violations == 0; }
};

inline BoundSummary summarize_bound(std::string name, const std::vector<Verdict>& verdicts, bool surrogate = false) {
  BoundSummary s;
  s.name = std::move(name);
  s.surrogate = surrogate;
  s.evaluated = verdicts.size();
  if (verdicts.empty()) {
    s.skipped = true;
    return s;
  }
  double best_margin = std::numeric_limits<double>::infinity();
  for (const auto& v : verdicts) {
    if (!v.satisfied) ++s.violations;
    const double margin = v.rhs + verdict_tolerance(v.lhs, v.rhs) - v.lhs;
    if (margin < best_margin || std::isnan(margin)) {
      best_margin = margin;
      s.worst = v;
    }
  }
  return s;
}

inline BoundSummary skipped_bound(std::string name) {
  BoundSummary s;
  s.name = std::move(name);
  s.skipped = true;
  return s;
}

/// Fixed order of the bound lines in every report.
inline const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names = {"Lemma1",        "Lemma2a",  "Lemma2b", "Lemma2c",
                                                 "InnerChain",    "Thm1-stated", "Thm1-proof-variant",
                                                 "Cor1",          "Cor2",     "CorBox1", "CorBox2",
                                                 "Prop"};
  return names;
}

struct RegretReport {
  std::vector<double> dynamic_regret;               // per objective
  std::vector<std::optional<double>> static_regret; // empty when the sum is unsupported
  std::vector<std::vector<double>> gaps;            // [i][t-1]
  PathLengths paths;
  DriftEstimate drift;
  MinCompositeTrace min_composite;
  std::vector<BoundSummary> bounds;                 // in bound_names() order
  double alpha_min = 1.0;
  double L = 0.0;
  bool sigma_surrogate = false;
  std::string optimum_selection = "limit point of the forward-backward oracle";

  const BoundSummary& bound(const std::string& name) const {
    for (const auto& b : bounds)
      if (b.name == name) return b;
    throw std::out_of_range("no bound named " + name);
  }
};

inline std::vector<Verdict> flatten(const std::vector<std::vector<Verdict>>& rows) {
  std::vector<Verdict> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// Every regret quantity and bound verdict for a finished run.
inline RegretReport evaluate_run(const ObjectiveStream& stream, const Trajectory& traj, const OptimumTrace& trace,
                                 const EngineConfig& config, double tol = 1e-10) {
  const int N = stream.count();
  const int T = traj.horizon();
  RegretReport rep;
  rep.alpha_min = config.alpha_min();
  rep.L = max_lipschitz(stream, T);
  for (int i = 0; i < N; ++i) {
    rep.gaps.push_back(per_step_gaps(traj, stream, trace, i));
    double sum = 0.0;
    for (double g : rep.gaps.back()) sum += g;
    rep.dynamic_regret.push_back(sum);
    try {
      rep.static_regret.emplace_back(static_regret(traj, stream, i, tol));
    } catch (const UnsupportedScenario&) {
      rep.static_regret.emplace_back(std::nullopt);
    }
  }
  rep.paths = path_lengths(traj, stream, trace);
  rep.sigma_surrogate = rep.paths.any_surrogate;
  rep.drift = drift_bound(traj, stream);
  rep.min_composite = min_composite_trace(traj, stream, config.alphas, trace);

  std::vector<Verdict> lemma1;
  for (int t = 1; t <= T; ++t) {
    const auto objs = stream.at(t);
    for (int i = 0; i < N; ++i)
      lemma1.push_back(check_lemma1(objs[static_cast<std::size_t>(i)], traj.x(t), trace.at(t, i).point,
                                    config.steps[static_cast<std::size_t>(i)]).bound);
  }
  rep.bounds.push_back(summarize_bound("Lemma1", lemma1));

  const auto l2 = check_lemma2(traj, trace, config.K, rep.paths);
  rep.bounds.push_back(summarize_bound("Lemma2a", l2.a, l2.surrogate));
  rep.bounds.push_back(summarize_bound("Lemma2b", flatten(l2.b), l2.surrogate));
  rep.bounds.push_back(l2.c_skipped ? skipped_bound("Lemma2c") : summarize_bound("Lemma2c", flatten(l2.c), l2.surrogate));
  rep.bounds.push_back(summarize_bound("InnerChain", check_inner_chain(traj)));

  if (config.one_hot_index()) {
    rep.bounds.push_back(skipped_bound("Thm1-stated"));
    rep.bounds.push_back(skipped_bound("Thm1-proof-variant"));
    const auto cor = check_corollary(traj, stream, trace, config, rep.drift);
    rep.bounds.push_back(summarize_bound("Cor1", {cor.next_iterate}));
    rep.bounds.push_back(summarize_bound("Cor2", {cor.with_drift}));
    rep.bounds.push_back(summarize_bound("CorBox1", {cor.per_step}));
    rep.bounds.push_back(summarize_bound("CorBox2", {cor.final_step}));
  } else {
    const auto th = check_theorem1(rep.dynamic_regret, config, traj.x(1), trace, rep.paths);
    rep.bounds.push_back(summarize_bound("Thm1-stated", th.stated, th.surrogate));
    rep.bounds.push_back(summarize_bound("Thm1-proof-variant", th.proof_variant, th.surrogate));
    for (const char* name : {"Cor1", "Cor2", "CorBox1", "CorBox2"}) rep.bounds.push_back(skipped_bound(name));
  }

  const double vT = rep.paths.v.back(), wT = rep.paths.w.back(), sT = rep.paths.sigma.back();
  const double core = (vT + wT + config.K * sT) * (vT + wT + config.K * sT) *
                      theorem_weight_factor(rep.alpha_min, config.steps, traj.x(1), trace);
  rep.bounds.push_back(
      summarize_bound("Prop", flatten(check_proposition(traj, stream, trace, rep.L, core)), rep.paths.any_surrogate));
  return rep;
}

}  // namespace tvmoo
