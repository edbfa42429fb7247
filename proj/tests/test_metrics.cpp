#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tvmoo;
using tvmoo::test::composite;
using tvmoo::test::constant_stream;
using tvmoo::test::scalar_quadratic;
using tvmoo::test::vec;

namespace {

std::vector<CompositeObjective> symmetric_pair() {
  return {composite(scalar_quadratic(1.0, 1.0)), composite(scalar_quadratic(1.0, -1.0))};
}

Trajectory manual_trajectory(std::initializer_list<double> xs) {
  Trajectory t;
  for (double x : xs) t.outer.push_back(vec({x}));
  t.displacements.assign(t.outer.size() - 1, {});
  return t;
}

}  // namespace

TEST(Verdict, ToleranceScalesWithMagnitude) {
  EXPECT_TRUE(make_verdict(1.0 + 1e-10, 1.0).satisfied);
  EXPECT_FALSE(make_verdict(1.0 + 1e-8, 1.0).satisfied);
  EXPECT_TRUE(make_verdict(1e6 + 1e-4, 1e6).satisfied);
  EXPECT_TRUE(make_verdict(5.0, std::numeric_limits<double>::infinity()).satisfied);
  EXPECT_DOUBLE_EQ(make_verdict(1.0, 3.0).slack, 2.0);
}

TEST(Regret, SingleStepQuadratic) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0))}, 1);
  const auto trace = compute_optimum_trace(stream, 1);
  const auto traj = manual_trajectory({2.0, 0.0});
  EXPECT_DOUBLE_EQ(dynamic_regret(traj, stream, trace, 0), 2.0);
}

TEST(Regret, StationaryAtOptimumIsZeroAndStaticAgrees) {
  const auto stream = constant_stream({composite(scalar_quadratic(2.0, 1.5), l1_term(0.5))}, 8);
  const auto trace = compute_optimum_trace(stream, 8);
  const Vector x1 = trace.at(1, 0).point;
  const auto traj = run_online(stream, x1, {{1.0}, {0.5}, 3, 8});
  EXPECT_NEAR(dynamic_regret(traj, stream, trace, 0), 0.0, 1e-8);
  EXPECT_NEAR(static_regret(traj, stream, 0), 0.0, 1e-8);
}

TEST(Regret, StaticAndDynamicCoincideOnStationaryStreams) {
  const auto stream = constant_stream(symmetric_pair(), 6);
  const auto trace = compute_optimum_trace(stream, 6);
  const auto traj = run_online(stream, vec({3.0}), {{0.3, 0.7}, {1.0, 1.0}, 2, 6});
  for (int i = 0; i < 2; ++i)
    EXPECT_NEAR(static_regret(traj, stream, i), dynamic_regret(traj, stream, trace, i), 1e-8);
}

TEST(PathLengths, Examples) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0))}, 3);
  const auto trace = compute_optimum_trace(stream, 3);
  const auto still = path_lengths(manual_trajectory({1.0, 1.0, 1.0, 1.0}), stream, trace);
  EXPECT_EQ(still.v.back(), 0.0);
  EXPECT_EQ(still.w.back(), 0.0);
  EXPECT_DOUBLE_EQ(still.sigma.back(), 3.0);
  const auto moved = path_lengths(manual_trajectory({0.0, 3.0, 3.0, 1.0}), stream, trace);
  EXPECT_EQ(moved.v, (std::vector<double>{3.0, 3.0, 5.0}));
}

TEST(PathLengths, OptimumMovementUsesTheWorstObjective) {
  ObjectiveStream s(1, 2, 3, [](int t) {
    return std::vector{composite(scalar_quadratic(1.0, t)), composite(scalar_quadratic(1.0, -2.0 * t))};
  });
  const auto trace = compute_optimum_trace(s, 3);
  const auto pl = path_lengths(manual_trajectory({0, 0, 0, 0}), s, trace);
  // Max over i of |opt move| is 2 per step; the last step has no successor.
  EXPECT_NEAR(pl.w[0], 2.0, 1e-12);
  EXPECT_NEAR(pl.w[1], 4.0, 1e-12);
  EXPECT_NEAR(pl.w[2], 4.0, 1e-12);
}

TEST(PathLengths, StreamingMatchesBatch) {
  const auto spec = load_scenario(tvmoo::test::scenario_path("drift2.scn"));
  const auto stream = build_stream(spec);
  const auto cfg = make_config(spec, stream);
  StreamingPathLengths live(stream);
  const auto traj = run_online(stream, spec.x1, cfg, live.observer());
  const auto trace = compute_optimum_trace(stream, spec.T);
  const auto batch = path_lengths(traj, stream, trace);
  EXPECT_EQ(live.v(), batch.v);
  EXPECT_EQ(live.sigma(), batch.sigma);
  for (std::size_t t = 1; t < batch.v.size(); ++t) {
    EXPECT_GE(batch.v[t], batch.v[t - 1]);
    EXPECT_GE(batch.w[t], batch.w[t - 1]);
    EXPECT_GE(batch.sigma[t], batch.sigma[t - 1]);
  }
}

TEST(DriftBound, ConstantTrajectoryIsZero) {
  const auto stream = constant_stream(symmetric_pair(), 3);
  EXPECT_EQ(drift_bound(manual_trajectory({0.4, 0.4, 0.4, 0.4}), stream).e.value(), 0.0);
}

TEST(DriftBound, PicksLargestChange) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0), l1_term(3.0))}, 2);
  const auto d = drift_bound(manual_trajectory({0.0, 1.0, 3.0}), stream);
  // f changes by 0.5 and 4, g by 3 and 6.
  EXPECT_DOUBLE_EQ(d.e.value(), 6.0);
  EXPECT_EQ(d.worst_t, 2);
}

TEST(DriftBound, InfiniteNonsmoothValueIsAViolation) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0), box_term(-1, 1))}, 2);
  const auto d = drift_bound(manual_trajectory({0.0, 0.5, 2.0}), stream);
  EXPECT_TRUE(d.violated);
  EXPECT_FALSE(d.e.is_finite());
  EXPECT_EQ(d.worst_t, 2);
}

TEST(ForwardBackwardInequality, WorkedExample) {
  const auto obj = composite(scalar_quadratic(1.0, 0.0), l1_term(1.0));
  const auto chk = check_lemma1(obj, vec({2.0}), vec({0.0}), 0.5);
  EXPECT_DOUBLE_EQ(chk.bound.lhs, 0.625);
  EXPECT_DOUBLE_EQ(chk.bound.rhs, 3.75);
  EXPECT_TRUE(chk.bound.satisfied);
  EXPECT_TRUE(chk.descent);
}

TEST(ForwardBackwardInequality, YAtTheImageAndAtTheMinimizer) {
  const auto obj = composite(scalar_quadratic(3.0, 1.0), l1_term(0.7));
  const Vector x = vec({-4.0});
  const Vector tx = prox_grad_map(obj, x, 0.2).point;
  const auto at_image = check_lemma1(obj, x, tx, 0.2);
  EXPECT_EQ(at_image.bound.lhs, 0.0);
  EXPECT_GE(at_image.bound.rhs, 0.0);
  const Vector opt = solve_offline(obj, x).point;
  const auto at_opt = check_lemma1(obj, opt, opt, 0.2);
  EXPECT_LE(at_opt.bound.lhs, 1e-12);
  EXPECT_TRUE(at_opt.bound.satisfied);
}

TEST(ForwardBackwardInequality, RandomSuiteHolds) {
  const auto res = run_lemma1_suite(300, 17);
  EXPECT_EQ(res.samples.size(), 300u);
  EXPECT_EQ(res.bound_failures, 0u);
  EXPECT_EQ(res.descent_failures, 0u);
}

TEST(DistanceBounds, SingleExactStep) {
  for (int K : {1, 4}) {
    const auto stream = constant_stream({composite(scalar_quadratic(1.0, 2.0))}, 1);
    const auto traj = run_online(stream, vec({-1.0}), {{1.0}, {1.0}, K, 1}, {}, true);
    const auto trace = compute_optimum_trace(stream, 1);
    const auto pl = path_lengths(traj, stream, trace);
    const auto l2 = check_lemma2(traj, trace, K, pl);
    EXPECT_DOUBLE_EQ(l2.a[0].lhs, 3.0);
    EXPECT_DOUBLE_EQ(l2.a[0].rhs, 3.0 * K);
    EXPECT_TRUE(l2.a[0].satisfied);
    EXPECT_TRUE(l2.b[0][0].satisfied);
    EXPECT_TRUE(l2.c[0][0].satisfied);
  }
}

TEST(DistanceBounds, PartCIsSkippedWithoutInnerRecord) {
  const auto stream = constant_stream(symmetric_pair(), 2);
  const auto traj = run_online(stream, vec({1.0}), {{0.5, 0.5}, {1, 1}, 1, 2});
  const auto trace = compute_optimum_trace(stream, 2);
  const auto l2 = check_lemma2(traj, trace, 1, path_lengths(traj, stream, trace));
  EXPECT_TRUE(l2.c_skipped);
  EXPECT_TRUE(l2.c.empty());
}

// A convex combination of nonexpansive forward-backward maps is
// nonexpansive, so inner displacements never grow.
TEST(InnerChain, HoldsOnRandomComposites) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    std::vector<CompositeObjective> objs;
    std::vector<double> steps;
    for (int i = 0; i < 3; ++i) {
      Matrix G(2, 2);
      G << u(rng), u(rng), u(rng), u(rng);
      const auto f = quadratic_term({G * G.transpose() + 0.01 * Matrix::Identity(2, 2), vec({5 * u(rng), 5 * u(rng)}), 0});
      const ProxTerm g = i == 0 ? l1_term(1 + u(rng)) : i == 1 ? box_term(-3, 3) : zero_term();
      objs.push_back({f, g});
      steps.push_back((0.001 + 0.999 * 0.5 * (1.0 + u(rng))) / f.lipschitz);
    }
    const double a = 0.5 * (1 + u(rng)) * 0.9 + 0.05;
    const auto stream = constant_stream(objs, 2);
    const auto traj = run_online(stream, vec({2.0, -2.0}), {{a, (1 - a) / 2, (1 - a) / 2}, steps, 8, 2});
    for (const auto& v : check_inner_chain(traj)) EXPECT_TRUE(v.satisfied) << v.lhs << " > " << v.rhs;
  }
}

TEST(RegretBound, CoincidingOptimaGiveZeroBound) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.5)), composite(scalar_quadratic(2.0, 0.5))}, 4);
  const EngineConfig cfg{{0.5, 0.5}, {1.0, 0.5}, 2, 4};
  const auto traj = run_online(stream, vec({0.5}), cfg);
  const auto trace = compute_optimum_trace(stream, 4);
  const auto pl = path_lengths(traj, stream, trace);
  const std::vector<double> regrets{dynamic_regret(traj, stream, trace, 0), dynamic_regret(traj, stream, trace, 1)};
  const auto th = check_theorem1(regrets, cfg, traj.x(1), trace, pl);
  EXPECT_EQ(th.rhs_stated, 0.0);
  EXPECT_TRUE(th.stated[0].satisfied);
  EXPECT_TRUE(th.stated[1].satisfied);
}

TEST(RegretBound, SymmetricPairFromTheCompromise) {
  const int T = 5, K = 2;
  const auto stream = constant_stream(symmetric_pair(), T);
  const EngineConfig cfg{{0.5, 0.5}, {1.0, 1.0}, K, T};
  const auto traj = run_online(stream, vec({0.0}), cfg);
  const auto trace = compute_optimum_trace(stream, T);
  const auto pl = path_lengths(traj, stream, trace);
  const std::vector<double> regrets{dynamic_regret(traj, stream, trace, 0), dynamic_regret(traj, stream, trace, 1)};
  EXPECT_DOUBLE_EQ(regrets[0], 0.5 * T);
  const auto th = check_theorem1(regrets, cfg, traj.x(1), trace, pl);
  // v = w = 0, sigma_T = 2T, factor (1/(2 * 0.5) + 1/(2 * 0.5))^2 = 4.
  EXPECT_DOUBLE_EQ(th.rhs_stated, std::pow(K * 2.0 * T, 2) * 4.0);
  EXPECT_DOUBLE_EQ(th.rhs_proof, th.rhs_stated);
  EXPECT_TRUE(th.stated[0].satisfied);
}

TEST(RegretBound, OneHotWeightsAreRedirected) {
  const auto stream = constant_stream(symmetric_pair(), 1);
  const EngineConfig cfg{{1.0, 0.0}, {1.0, 1.0}, 1, 1};
  const auto traj = run_online(stream, vec({0.0}), cfg);
  const auto trace = compute_optimum_trace(stream, 1);
  const auto pl = path_lengths(traj, stream, trace);
  EXPECT_THROW(check_theorem1(std::vector{0.0, 0.0}, cfg, traj.x(1), trace, pl), ContractError);
}

TEST(OneHotRegretBound, ExactStepSingleObjective) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0))}, 1);
  const EngineConfig cfg{{1.0}, {1.0}, 3, 1};
  const auto traj = run_online(stream, vec({1.0}), cfg);
  const auto trace = compute_optimum_trace(stream, 1);
  const auto cor = check_corollary(traj, stream, trace, cfg, drift_bound(traj, stream));
  EXPECT_EQ(cor.next_iterate.lhs, 0.0);
  EXPECT_DOUBLE_EQ(cor.next_iterate.rhs, 0.25);
  EXPECT_TRUE(cor.next_iterate.satisfied);
  // x^1 = 1 costs 1/2; e = |f(0) - f(1)| = 1/2.
  EXPECT_DOUBLE_EQ(cor.with_drift.lhs, 0.5);
  EXPECT_DOUBLE_EQ(cor.with_drift.rhs, 0.75);
}

TEST(OneHotRegretBound, RequiresOneHotWeights) {
  const auto stream = constant_stream(symmetric_pair(), 1);
  const EngineConfig cfg{{0.5, 0.5}, {1.0, 1.0}, 1, 1};
  const auto traj = run_online(stream, vec({0.0}), cfg);
  const auto trace = compute_optimum_trace(stream, 1);
  EXPECT_THROW(check_corollary(traj, stream, trace, cfg, drift_bound(traj, stream)), ContractError);
}

TEST(GradientGapBound, ZeroGapAtTheOptimum) {
  const auto stream = constant_stream({composite(scalar_quadratic(1.0, 0.0))}, 2);
  const auto trace = compute_optimum_trace(stream, 2);
  const auto rows = check_proposition(manual_trajectory({0.0, 0.0, 0.0}), stream, trace, 1.0, 0.0);
  EXPECT_EQ(rows[0][0].lhs, 0.0);
  EXPECT_TRUE(rows[1][0].satisfied);
  const auto off = check_proposition(manual_trajectory({1.0, 0.0, 0.0}), stream, trace, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(off[0][0].lhs, 1.0);
  EXPECT_DOUBLE_EQ(off[0][0].rhs, 6.0);
}

TEST(MinComposite, SymmetricPairAtZero) {
  const auto stream = constant_stream(symmetric_pair(), 1);
  const auto trace = compute_optimum_trace(stream, 1);
  const auto mc = min_composite_trace(manual_trajectory({0.0, 0.0}), stream, std::vector{0.5, 0.5}, trace);
  EXPECT_DOUBLE_EQ(mc.phi_at_iterate[0], 0.5);
  EXPECT_NEAR(mc.combined_optimum[0][0], 0.0, 1e-15);
  EXPECT_NEAR(mc.weighted_optimal_sum[0], 0.0, 1e-15);
}

TEST(MinComposite, SingleObjectiveIsItself) {
  const auto stream = constant_stream({composite(scalar_quadratic(2.0, 1.0))}, 1);
  const auto trace = compute_optimum_trace(stream, 1);
  const auto mc = min_composite_trace(manual_trajectory({3.0, 0.0}), stream, std::vector{1.0}, trace);
  EXPECT_DOUBLE_EQ(mc.phi_at_iterate[0], 4.0);
}

TEST(EvaluateRun, BoundsFollowTheFixedOrder) {
  for (auto alphas : {std::vector{0.5, 0.5}, std::vector{1.0, 0.0}}) {
    const auto stream = constant_stream(symmetric_pair(), 3);
    const EngineConfig cfg{alphas, {1.0, 1.0}, 2, 3};
    const auto traj = run_online(stream, vec({2.0}), cfg);
    const auto rep = evaluate_run(stream, traj, compute_optimum_trace(stream, 3), cfg);
    ASSERT_EQ(rep.bounds.size(), bound_names().size());
    for (std::size_t k = 0; k < rep.bounds.size(); ++k) EXPECT_EQ(rep.bounds[k].name, bound_names()[k]);
    EXPECT_EQ(rep.bound("Thm1-stated").skipped, alphas[0] == 1.0);
    EXPECT_EQ(rep.bound("Cor1").skipped, alphas[0] != 1.0);
    EXPECT_TRUE(rep.bound("Lemma2c").skipped);
  }
}

TEST(EvaluateRun, SummandsAreNonnegative) {
  const auto spec = load_scenario(tvmoo::test::scenario_path("stationary2.scn"));
  const auto res = run_experiment(spec);
  for (const auto& row : res.report.gaps)
    for (double g : row) EXPECT_GE(g, -1e-8);
}
