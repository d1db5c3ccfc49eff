#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dotmark {

/// Objective callback: returns f(x) and writes the gradient into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 20000;
  /// Stop once the largest gradient component is at most this.
  double gradient_tol = 1e-6;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 40;
  /// Optional positive diagonal used as the initial inverse Hessian, rescaled
  /// each iteration by the latest curvature pair. Empty means the identity.
  std::vector<double> diagonal;
};

enum class LbfgsStatus { Converged, IterationLimit, LineSearchFailed };

struct LbfgsResult {
  std::vector<double> x;
  std::vector<double> gradient;
  double value = 0.0;
  double gradient_norm = 0.0;  // sup norm
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::IterationLimit;
};

/**
 * @brief Limited-memory BFGS with a strong-Wolfe line search.
 *
 * The line search brackets a step and then zooms with safeguarded cubic
 * interpolation. Accepted steps never increase f. On line-search failure the
 * best iterate found so far is returned. Throws NumericalError if f or its
 * gradient is non-finite at the starting point.
 */
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options = {});

}  // namespace dotmark
