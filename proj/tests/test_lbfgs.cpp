#include <cmath>

#include "doctest.h"
#include "dotmark/errors.hpp"
#include "dotmark/lbfgs.hpp"

using namespace dotmark;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (auto& v : g) v = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    f += 100.0 * a * a + b * b;
    g[i] += -400.0 * a * x[i] - 2.0 * b;
    g[i + 1] += 200.0 * a;
  }
  return f;
}

// Badly scaled quadratic: sum of k^2 (x_k - 1)^2.
double scaled_quadratic(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double s = static_cast<double>((k + 1) * (k + 1));
    f += s * (x[k] - 1.0) * (x[k] - 1.0);
    g[k] = 2.0 * s * (x[k] - 1.0);
  }
  return f;
}

}  // namespace

TEST_CASE("Rosenbrock") {
  for (const std::size_t dim : {2u, 10u, 50u}) {
    std::vector<double> x0(dim, -1.2);
    LbfgsOptions options;
    options.gradient_tol = 1e-8;
    const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, options);
    CHECK(r.status == LbfgsStatus::Converged);
    CHECK(r.gradient_norm <= 1e-8);
    for (const double v : r.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.evaluations >= r.iterations);
  }
}

TEST_CASE("the returned point is the best evaluated") {
  double best = INFINITY;
  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    const double v = rosenbrock(x, g);
    best = std::min(best, v);
    return v;
  };
  const LbfgsResult r = minimize_lbfgs(f, std::vector<double>(6, -1.2));
  CHECK(r.value == best);
}

TEST_CASE("diagonal scaling") {
  const std::size_t dim = 30;
  LbfgsOptions plain;
  plain.gradient_tol = 1e-9;
  LbfgsOptions scaled = plain;
  for (std::size_t k = 0; k < dim; ++k) scaled.diagonal.push_back(1.0 / (2.0 * (k + 1) * (k + 1)));
  const LbfgsResult a = minimize_lbfgs(scaled_quadratic, std::vector<double>(dim, 0.0), plain);
  const LbfgsResult b = minimize_lbfgs(scaled_quadratic, std::vector<double>(dim, 0.0), scaled);
  CHECK(a.status == LbfgsStatus::Converged);
  CHECK(b.status == LbfgsStatus::Converged);
  // The exact inverse Hessian solves a quadratic in one step.
  CHECK(b.iterations <= 2);
  CHECK(b.iterations < a.iterations);
  for (const double v : b.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("iteration limit keeps the best point") {
  LbfgsOptions options;
  options.max_iterations = 3;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, std::vector<double>(4, -1.2), options);
  CHECK(r.status == LbfgsStatus::IterationLimit);
  CHECK(r.iterations == 3);
  std::vector<double> g(4);
  CHECK(rosenbrock(r.x, g) == r.value);
}

TEST_CASE("already optimal") {
  const LbfgsResult r = minimize_lbfgs(scaled_quadratic, std::vector<double>(5, 1.0));
  CHECK(r.status == LbfgsStatus::Converged);
  CHECK(r.iterations == 0);
  CHECK(r.value == 0.0);
}

TEST_CASE("bad input") {
  LbfgsOptions options;
  options.memory = 0;
  CHECK_THROWS_AS(minimize_lbfgs(rosenbrock, {0.0, 0.0}, options), InvalidArgument);
  options = {};
  options.c2 = options.c1 / 2;
  CHECK_THROWS_AS(minimize_lbfgs(rosenbrock, {0.0, 0.0}, options), InvalidArgument);
  options = {};
  options.diagonal = {1.0};
  CHECK_THROWS_AS(minimize_lbfgs(rosenbrock, {0.0, 0.0}, options), InvalidArgument);
  options.diagonal = {1.0, -1.0};
  CHECK_THROWS_AS(minimize_lbfgs(rosenbrock, {0.0, 0.0}, options), InvalidArgument);
  const Objective nan_start = [](std::span<const double>, std::span<double> g) {
    for (auto& v : g) v = 0.0;
    return NAN;
  };
  CHECK_THROWS_AS(minimize_lbfgs(nan_start, {0.0}), NumericalError);
}
