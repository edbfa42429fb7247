#pragma once

#include "tvmoo/objective.hpp"

#include <functional>
#include <optional>
#include <sstream>
#include <vector>

namespace tvmoo {

/// Weights alpha_i, per-objective step sizes C_i, inner budget K, horizon T.
struct EngineConfig {
  std::vector<double> alphas;
  std::vector<double> steps;
  int K = 1;
  int T = 1;

  /// Checks everything that does not depend on the objectives.
  void validate() const {
    if (alphas.empty()) throw ContractError("engine config: no weights");
    if (steps.size() != alphas.size()) throw ContractError("engine config: one step size per weight required");
    if (K < 1) throw ContractError("engine config: K must be a positive integer");
    if (T < 1) throw ContractError("engine config: T must be a positive integer");
    double sum = 0.0;
    for (double a : alphas) {
      if (!(a >= 0.0 && a <= 1.0)) throw ContractError("engine config: every weight must lie in [0, 1]");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ContractError("engine config: weights must sum to 1");
    for (double c : steps)
      if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("engine config: step sizes must be positive");
  }

  /// min { alpha_i : alpha_i != 0 }.
  double alpha_min() const {
    double m = 1.0;
    for (double a : alphas)
      if (a != 0.0) m = std::min(m, a);
    return m;
  }

  /// Index i with alpha_i == 1 (all others then vanish), if any.
  std::optional<int> one_hot_index() const {
    for (std::size_t i = 0; i < alphas.size(); ++i)
      if (alphas[i] == 1.0) return static_cast<int>(i);
    return std::nullopt;
  }

  /// C_i <= 1/L_{f_{i,t}} for the objectives revealed at time t.
  void validate_against(const std::vector<CompositeObjective>& objs, int t) const {
    if (objs.size() != alphas.size()) {
      std::ostringstream os;
      os << "engine config: " << alphas.size() << " weights for " << objs.size() << " objectives";
      throw ConfigError(os.str());
    }
    for (std::size_t i = 0; i < objs.size(); ++i) {
      try {
        require_step_scale(steps[i], objs[i].smooth.lipschitz);
      } catch (const ContractError& e) {
        std::ostringstream os;
        os << "objective " << i + 1 << " at t=" << t << ": " << e.what();
        throw ContractError(os.str());
      }
    }
  }
};

/// Output of one combine: x^{t,k+1} and the candidates y^{t,k+1,i}.
/// A candidate is empty when its weight is zero and recording is off.
struct InnerStep {
  Vector next;
  std::vector<std::optional<Vector>> candidates;
};

inline InnerStep inner_step(const std::vector<CompositeObjective>& objs, const Vector& x,
                            const EngineConfig& config, bool record_all = true) {
  InnerStep out;
  out.candidates.resize(objs.size());
  out.next = Vector::Zero(x.size());
  // Fixed summation order i = 1..N keeps the combine bitwise reproducible.
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const double a = config.alphas[i];
    if (a == 0.0 && !record_all) continue;
    Vector y = prox_grad_map(objs[i], x, config.steps[i]).point;
    if (a != 0.0) out.next += a * y;
    out.candidates[i] = std::move(y);
  }
  return out;
}

/// Full inner history of one time step.
struct InnerRecord {
  std::vector<Vector> iterates;                  // x^{t,0} .. x^{t,K+1}
  std::vector<std::vector<Vector>> candidates;   // [k][i] = y^{t,k+1,i}, k = 0..K
};

struct TimeStepResult {
  Vector x_out;
  /// |x^{t,k+1} - x^{t,k}| for k = 0..K; always kept.
  std::vector<double> displacements;
  std::optional<InnerRecord> record;
};

/// K+1 combines (k = 0..K) starting from x^{t,0} = x_in.
inline TimeStepResult run_time_step(const std::vector<CompositeObjective>& objs, const Vector& x_in,
                                    const EngineConfig& config, bool record_inner = false) {
  TimeStepResult res;
  res.displacements.reserve(static_cast<std::size_t>(config.K) + 1);
  if (record_inner) {
    res.record.emplace();
    res.record->iterates.push_back(x_in);
  }
  Vector x = x_in;
  for (int k = 0; k <= config.K; ++k) {
    InnerStep step = inner_step(objs, x, config, record_inner);
    res.displacements.push_back((step.next - x).norm());
    if (record_inner) {
      std::vector<Vector> ys;
      ys.reserve(step.candidates.size());
      for (auto& y : step.candidates) ys.push_back(std::move(*y));
      res.record->candidates.push_back(std::move(ys));
      res.record->iterates.push_back(step.next);
    }
    x = std::move(step.next);
  }
  res.x_out = std::move(x);
  return res;
}

/// Outer iterates x^1 .. x^{T+1} plus optional inner history.
struct Trajectory {
  std::vector<Vector> outer;
  std::vector<std::vector<double>> displacements;  // [t-1][k]
  std::vector<InnerRecord> inner;                  // empty unless recorded

  int horizon() const { return static_cast<int>(outer.size()) - 1; }
  const Vector& x(int t) const { return outer.at(static_cast<std::size_t>(t - 1)); }
  bool has_inner() const { return !inner.empty(); }
};

/// Called once per time step, after x^{t+1} is committed.
using StepObserver = std::function<void(int t, const Vector& xt, const Vector& xnext, const TimeStepResult&)>;

/// Online loop: at step t only phi_{.,t} is read, and x^{t+1} = x^{t,K+1}
/// warm-starts step t+1.
inline Trajectory run_online(const ObjectiveStream& stream, const Vector& x1, const EngineConfig& config,
                             const StepObserver& observer = {}, bool record_inner = false) {
  config.validate();
  if (stream.horizon() < config.T) {
    std::ostringstream os;
    os << "stream horizon " << stream.horizon() << " shorter than T=" << config.T;
    throw ConfigError(os.str());
  }
  if (x1.size() != stream.dim()) throw ConfigError("initial point has the wrong dimension");

  Trajectory traj;
  traj.outer.reserve(static_cast<std::size_t>(config.T) + 1);
  traj.outer.push_back(x1);
  for (int t = 1; t <= config.T; ++t) {
    const auto objs = stream.at(t);
    config.validate_against(objs, t);
    const Vector xt = traj.outer.back();
    if (t == 1) {
      for (const auto& o : objs)
        if (!o.nonsmooth.value(xt).is_finite()) throw DomainError("initial point outside the domain of phi_{i,1}");
    }
    TimeStepResult step = run_time_step(objs, xt, config, record_inner);
    traj.outer.push_back(step.x_out);
    traj.displacements.push_back(step.displacements);
    if (observer) observer(t, xt, traj.outer.back(), step);
    if (step.record) traj.inner.push_back(std::move(*step.record));
  }
  return traj;
}

}  // namespace tvmoo
