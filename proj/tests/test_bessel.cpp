#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dotmark/benchgen.hpp"
#include "dotmark/bessel.hpp"
#include "dotmark/errors.hpp"

using namespace dotmark;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double k_half(double x) { return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x); }
double k_three_halves(double x) { return k_half(x) * (1.0 + 1.0 / x); }

// K_{1/2} and K_{3/2} closed forms pushed up by the recurrence.
double k_half_integer(int twice_order, double x) {
  double lo = k_half(x), hi = k_three_halves(x);
  if (twice_order == 1) return lo;
  for (int t = 3; t < twice_order; t += 2) {
    const double next = lo + (t / x) * hi;  // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu, 2 nu = t
    lo = hi;
    hi = next;
  }
  return hi;
}

// K_nu(x) = integral over t > 0 of exp(-x cosh t) cosh(nu t), composite Simpson.
double k_quadrature(double nu, double x) {
  const double upper = std::acosh(40.0 / x + 1.0) + 2.0;
  const int steps = 20000;
  const double h = upper / steps;
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * h;
    const double f = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += f * (k == 0 || k == steps ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("half-integer closed forms") {
  for (const double x : {1e-3, 0.01, 0.3, 1.0, 1.999, 2.0, 2.5, 7.0, 30.0, 200.0}) {
    CHECK(rel(bessel_k(0.5, x), k_half(x)) < 1e-10);
    CHECK(rel(bessel_k(1.5, x), k_three_halves(x)) < 1e-10);
    for (int twice = 5; twice <= 11; twice += 2) CHECK(rel(bessel_k(twice / 2.0, x), k_half_integer(twice, x)) < 1e-10);
  }
}

TEST_CASE("order 4.5 at 1 from the recurrence") {
  CHECK(rel(bessel_k(4.5, 1.0), k_half_integer(9, 1.0)) < 1e-10);
}

TEST_CASE("recurrence identity over a grid") {
  for (double nu = 0.05; nu < 6.0; nu += 0.37) {
    for (double x = 0.02; x < 40.0; x *= 1.7) {
      const double lhs = bessel_k(nu + 1.0, x) - bessel_k(std::abs(nu - 1.0), x);
      const double rhs = 2.0 * nu / x * bessel_k(nu, x);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(bessel_k(nu + 1.0, x)));
    }
  }
}

TEST_CASE("agreement with an integral representation") {
  for (const double nu : {0.0, 0.25, 1.0, 2.3, 4.5}) {
    for (const double x : {0.1, 0.8, 1.9, 2.1, 5.0}) CHECK(rel(bessel_k(nu, x), k_quadrature(nu, x)) < 1e-8);
  }
}

TEST_CASE("Wronskian I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x") {
  for (const double nu : {0.0, 0.5, 1.0, 2.5}) {
    for (const double x : {0.5, 1.0, 3.0, 8.0}) {
      const double w = std::cyl_bessel_i(nu, x) * bessel_k(nu + 1.0, x) + std::cyl_bessel_i(nu + 1.0, x) * bessel_k(nu, x);
      CHECK(rel(w, 1.0 / x) < 1e-10);
    }
  }
}

TEST_CASE("bessel_k rejects bad input") {
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(bessel_k(1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(bessel_k(1.0, INFINITY), InvalidArgument);
  CHECK_THROWS_AS(bessel_k(NAN, 1.0), InvalidArgument);
}

TEST_CASE("bessel_k is even in the order") {
  for (const double nu : {0.3, 0.5, 1.7, 4.0}) CHECK(bessel_k(-nu, 1.3) == bessel_k(nu, 1.3));
}

TEST_CASE("Matern covariance") {
  const MaternParams exp_kernel{1.0, 0.5, 0.2};
  CHECK(matern_cov(0.0, exp_kernel) == 1.0);
  CHECK(rel(matern_cov(0.2, exp_kernel), std::exp(-1.0)) < 1e-12);
  for (double r = 0.01; r < 1.0; r += 0.07) CHECK(rel(matern_cov(r, exp_kernel), std::exp(-r / 0.2)) < 1e-10);

  // nu = 1, gamma = 0.15, r = 0.15: sqrt(2) K_1(sqrt(2)), against the integral oracle.
  const MaternParams smooth{1.0, 1.0, 0.15};
  CHECK(rel(matern_cov(0.15, smooth), std::sqrt(2.0) * k_quadrature(1.0, std::sqrt(2.0))) < 1e-8);

  for (int c = 2; c <= 6; ++c) {
    const MaternParams p = default_matern(c);
    CHECK(matern_cov(0.0, p) == p.variance);
    double prev = p.variance;
    for (double r = 1e-4; r < 2.0; r *= 1.3) {
      const double k = matern_cov(r, p);
      CHECK(k < prev);
      CHECK(k > 0.0);
      prev = k;
    }
    CHECK(matern_cov(50.0, p) < 1e-12);
  }
  CHECK_THROWS_AS(matern_cov(INFINITY, smooth), InvalidArgument);
  CHECK_THROWS_AS(matern_cov(-1.0, smooth), InvalidArgument);
}
