// Command-line front end: run scenarios, sample the single-step inequality,
// and print grid Pareto fronts.

#include "tvmoo/tvmoo.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

int cmd_run(const std::string& file, const std::string& out_dir, bool record_inner, double tol,
            const std::vector<std::string>& overrides) {
  const auto spec = tvmoo::load_scenario(file, overrides);
  const auto result = tvmoo::run_experiment(spec, {record_inner, tol});
  tvmoo::emit_report(result, out_dir);
  std::cout << tvmoo::format_summary(result);
  return 0;
}

int cmd_check_lemma1(int samples, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const auto res = tvmoo::run_lemma1_suite(samples, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : res.samples) worst = std::min(worst, s.check.bound.slack);
  std::cout << "samples=" << res.samples.size() << " bound_satisfied=" << res.samples.size() - res.bound_failures
            << " descent_satisfied=" << res.samples.size() - res.descent_failures
            << " min_slack=" << tvmoo::format_number(worst) << " seconds=" << secs << '\n';
  return res.passed() ? 0 : 1;
}

int cmd_pareto(const std::string& file, int t0, int grid, const std::vector<double>& box,
               const std::vector<std::string>& overrides) {
  const auto spec = tvmoo::load_scenario(file, overrides);
  const auto stream = tvmoo::build_stream(spec);
  const auto objs = stream.at(t0);
  double lo = 0.0, hi = 0.0;
  if (box.size() == 2) {
    lo = box[0];
    hi = box[1];
  } else {
    // Per-objective minimizers padded by one unit on each side.
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const auto& o : objs) {
      const auto sol = tvmoo::solve_offline(o, spec.x1);
      lo = std::min(lo, sol.point.minCoeff());
      hi = std::max(hi, sol.point.maxCoeff());
    }
    lo -= 1.0;
    hi += 1.0;
  }
  const auto front = tvmoo::grid_pareto_front(objs, spec.n, lo, hi, grid);
  for (int j = 0; j < spec.n; ++j) std::cout << (j ? "," : "") << "x" << j + 1;
  for (int i = 0; i < spec.N; ++i) std::cout << ",phi_" << i + 1;
  std::cout << '\n';
  for (const auto& p : front) {
    for (int j = 0; j < spec.n; ++j) std::cout << (j ? "," : "") << tvmoo::format_number(p.x[j]);
    for (double v : p.values) std::cout << ',' << tvmoo::format_number(v);
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-objective proximal gradient experiments"};
  app.require_subcommand(1);

  std::string file, out_dir = ".";
  bool record_inner = false;
  double tol = 1e-10;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run a scenario and write trace.csv and summary.txt");
  run->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--record-inner", record_inner, "Keep every inner iterate (enables Lemma2c)");
  run->add_option("--tol", tol, "Oracle tolerance")->check(CLI::PositiveNumber);
  run->add_option("--override", overrides, "key=value applied after the file");

  int samples = 1000;
  std::uint64_t seed = 0;
  auto* lemma1 = app.add_subcommand("check-lemma1", "Check the forward-backward inequality on random composites");
  lemma1->add_option("--samples", samples, "Number of samples")->check(CLI::PositiveNumber);
  lemma1->add_option("--seed", seed, "RNG seed");

  int t0 = 1, grid = 401;
  std::vector<double> box;
  auto* pareto = app.add_subcommand("pareto", "Print the nondominated grid points at one time step");
  pareto->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  pareto->add_option("--t", t0, "Time index")->check(CLI::PositiveNumber);
  pareto->add_option("--grid", grid, "Points per axis")->check(CLI::Range(2, 401));
  pareto->add_option("--box", box, "lo,hi of the grid box")->delimiter(',')->expected(2);
  pareto->add_option("--override", overrides, "key=value applied after the file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(file, out_dir, record_inner, tol, overrides);
    if (*lemma1) return cmd_check_lemma1(samples, seed);
    if (*pareto) return cmd_pareto(file, t0, grid, box, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
