#pragma once

#include "tvmoo/metrics.hpp"
#include "tvmoo/prox_terms.hpp"
#include "tvmoo/quadratic.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tvmoo {

/// One random sample of the forward-backward inequality.
struct Lemma1Sample {
  int dim = 0;
  std::string family;
  double condition = 1.0;
  double step = 0.0;
  Lemma1Check check;
};

struct Lemma1SuiteResult {
  std::vector<Lemma1Sample> samples;
  std::size_t bound_failures = 0;
  std::size_t descent_failures = 0;

  bool passed() const { return bound_failures == 0 && descent_failures == 0; }
};

/// Random composite phi = f + g with f quadratic (n <= 5, condition number
/// <= 1e4) and g drawn from {zero, l1, box}; random x, y in [-10, 10]^n
/// (y inside the box for box terms) and c uniform in (0, 1/L].
inline Lemma1SuiteResult run_lemma1_suite(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Lemma1SuiteResult out;
  out.samples.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const int n = 1 + static_cast<int>(rng() % 5);

    // A = Q diag(eig) Q' with eigenvalues log-spread over [lo, lo * cond].
    Matrix G(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) G(r, c) = uniform(-1.0, 1.0);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
    const double cond = std::pow(10.0, uniform(0.0, 4.0));
    const double lo = std::pow(10.0, uniform(-2.0, 1.0));
    Vector eig(n);
    for (int j = 0; j < n; ++j) eig[j] = lo * std::pow(cond, n == 1 ? 0.0 : static_cast<double>(j) / (n - 1));
    Matrix A = Q * eig.asDiagonal() * Q.transpose();
    A = 0.5 * (A + A.transpose());
    Vector b(n);
    for (int j = 0; j < n; ++j) b[j] = uniform(-5.0, 5.0);
    const SmoothTerm f = quadratic_term({A, b, uniform(-1.0, 1.0)});

    Lemma1Sample sample;
    sample.dim = n;
    sample.condition = cond;
    ProxTerm g;
    double box_lo = -10.0, box_hi = 10.0;
    switch (rng() % 3) {
      case 0:
        g = zero_term();
        sample.family = "zero";
        break;
      case 1:
        g = l1_term(uniform(0.01, 5.0));
        sample.family = "l1";
        break;
      default:
        box_lo = uniform(-10.0, -0.5);
        box_hi = uniform(0.5, 10.0);
        g = box_term(box_lo, box_hi);
        sample.family = "box";
        break;
    }
    const CompositeObjective obj{f, g};

    Vector x(n), y(n);
    for (int j = 0; j < n; ++j) {
      x[j] = uniform(-10.0, 10.0);
      y[j] = uniform(box_lo, box_hi);
    }
    // (0, 1]: 1 - [0, 1)
    sample.step = (1.0 - unit(rng)) / f.lipschitz;
    sample.check = check_lemma1(obj, x, y, sample.step);
    if (!sample.check.bound.satisfied) ++out.bound_failures;
    if (!sample.check.descent) ++out.descent_failures;
    out.samples.push_back(std::move(sample));
  }
  return out;
}

}  // namespace tvmoo
