#include "dotmark/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "dotmark/errors.hpp"

namespace dotmark {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double sup_norm(std::span<const double> a) {
  double s = 0.0;
  for (const double v : a) s = std::max(s, std::abs(v));
  return s;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); NaN when it has none.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return b - (b - a) * (db + d2 - d1) / denom;
}

struct Trial {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const LbfgsOptions& options, std::span<const double> x, std::span<const double> d,
             double f0, double slope0, int& evaluations)
      : f_(f), options_(options), x_(x), d_(d), f0_(f0), slope0_(slope0), evaluations_(evaluations),
        trial_x_(x.size()), trial_g_(x.size()), best_g_(x.size()) {
    best_.value = f0;
  }

  // Returns true if a strong-Wolfe step was found; best() holds the lowest point seen either way.
  bool run(double initial_step) {
    Trial prev{0.0, f0_, slope0_};
    double step = initial_step;
    for (int k = 0; k < options_.max_line_search; ++k) {
      const Trial t = evaluate(step);
      if (!std::isfinite(t.value) || t.value > f0_ + options_.c1 * t.step * slope0_ || (k > 0 && t.value >= prev.value)) {
        return zoom(prev, t, options_.max_line_search - k);
      }
      if (std::abs(t.slope) <= -options_.c2 * slope0_) return accept(t);
      if (t.slope >= 0.0) return zoom(t, prev, options_.max_line_search - k);
      prev = t;
      step *= 4.0;
    }
    return false;
  }

  const Trial& best() const noexcept { return best_; }
  std::span<const double> best_gradient() const noexcept { return best_g_; }

 private:
  Trial evaluate(double step) {
    for (std::size_t k = 0; k < x_.size(); ++k) trial_x_[k] = x_[k] + step * d_[k];
    ++evaluations_;
    Trial t{step, f_(trial_x_, trial_g_), 0.0};
    if (!std::isfinite(t.value) || !all_finite(trial_g_)) {
      t.value = std::numeric_limits<double>::infinity();
      return t;
    }
    t.slope = dot(trial_g_, d_);
    if (t.value < best_.value) {
      best_ = t;
      std::copy(trial_g_.begin(), trial_g_.end(), best_g_.begin());
    }
    return t;
  }

  // t is always the most recent evaluation, so trial_g_ is its gradient.
  bool accept(const Trial& t) {
    best_ = t;
    std::copy(trial_g_.begin(), trial_g_.end(), best_g_.begin());
    return true;
  }

  // lo satisfies sufficient decrease with the lowest value so far; the
  // minimizer lies between lo and hi.
  bool zoom(Trial lo, Trial hi, int budget) {
    for (int k = 0; k < budget; ++k) {
      const double width = hi.step - lo.step;
      if (std::abs(width) <= 1e-14 * std::max(std::abs(lo.step), std::abs(hi.step))) return false;
      double step = std::isfinite(hi.value)
                        ? cubic_minimizer(lo.step, lo.value, lo.slope, hi.step, hi.value, hi.slope)
                        : std::numeric_limits<double>::quiet_NaN();
      const double a = std::min(lo.step, hi.step);
      const double b = std::max(lo.step, hi.step);
      const double margin = 0.1 * (b - a);
      if (!std::isfinite(step) || step < a + margin || step > b - margin) step = 0.5 * (a + b);
      const Trial t = evaluate(step);
      if (t.value > f0_ + options_.c1 * t.step * slope0_ || t.value >= lo.value) {
        hi = t;
      } else {
        if (std::abs(t.slope) <= -options_.c2 * slope0_) return accept(t);
        if (t.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = t;
      }
    }
    return false;
  }

  const Objective& f_;
  const LbfgsOptions& options_;
  std::span<const double> x_;
  std::span<const double> d_;
  double f0_;
  double slope0_;
  int& evaluations_;
  std::vector<double> trial_x_;
  std::vector<double> trial_g_;
  Trial best_;
  std::vector<double> best_g_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options) {
  if (options.memory < 1 || options.max_iterations < 0 || !(options.gradient_tol >= 0.0) ||
      !(0.0 < options.c1 && options.c1 < options.c2 && options.c2 < 1.0)) {
    throw InvalidArgument("minimize_lbfgs: invalid options");
  }
  const std::size_t dim = x0.size();
  if (!options.diagonal.empty() &&
      (options.diagonal.size() != dim ||
       !std::all_of(options.diagonal.begin(), options.diagonal.end(), [](double v) { return v > 0.0 && std::isfinite(v); }))) {
    throw InvalidArgument("minimize_lbfgs: diagonal must be positive with one entry per variable");
  }
  std::vector<double> diag = options.diagonal;
  if (diag.empty()) diag.assign(dim, 1.0);
  LbfgsResult result;
  result.x = std::move(x0);
  result.gradient.assign(dim, 0.0);
  result.value = f(result.x, result.gradient);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !all_finite(result.gradient)) {
    throw NumericalError("minimize_lbfgs: objective is not finite at the starting point");
  }

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;
  std::vector<double> d(dim), alpha(options.memory);
  int failures = 0;

  while (true) {
    result.gradient_norm = sup_norm(result.gradient);
    if (result.gradient_norm <= options.gradient_tol) {
      result.status = LbfgsStatus::Converged;
      return result;
    }
    if (result.iterations >= options.max_iterations) {
      result.status = LbfgsStatus::IterationLimit;
      return result;
    }

    // Two-loop recursion for d = -H g.
    for (std::size_t k = 0; k < dim; ++k) d[k] = -result.gradient[k];
    for (std::size_t h = history.size(); h-- > 0;) {
      alpha[h] = history[h].rho * dot(history[h].s, d);
      for (std::size_t k = 0; k < dim; ++k) d[k] -= alpha[h] * history[h].y[k];
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const Pair& last = history.back();
      double yDy = 0.0;
      for (std::size_t k = 0; k < dim; ++k) yDy += last.y[k] * diag[k] * last.y[k];
      gamma = dot(last.s, last.y) / yDy;
    }
    for (std::size_t k = 0; k < dim; ++k) d[k] *= gamma * diag[k];
    for (std::size_t h = 0; h < history.size(); ++h) {
      const double beta = history[h].rho * dot(history[h].y, d);
      for (std::size_t k = 0; k < dim; ++k) d[k] += (alpha[h] - beta) * history[h].s[k];
    }
    double slope = dot(result.gradient, d);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t k = 0; k < dim; ++k) d[k] = -diag[k] * result.gradient[k];
      slope = dot(result.gradient, d);
    }

    LineSearch search(f, options, result.x, d, result.value, slope, result.evaluations);
    const bool wolfe = search.run(1.0);
    const Trial& step = search.best();
    if (!(step.value < result.value)) {
      result.status = LbfgsStatus::LineSearchFailed;
      return result;
    }
    if (!wolfe) {
      // Take the decrease anyway but drop curvature pairs that may be stale.
      if (++failures >= 2) {
        result.status = LbfgsStatus::LineSearchFailed;
      }
    } else {
      failures = 0;
    }

    Pair pair{std::vector<double>(dim), std::vector<double>(dim), 0.0};
    const auto g_next = search.best_gradient();
    for (std::size_t k = 0; k < dim; ++k) {
      pair.s[k] = step.step * d[k];
      pair.y[k] = g_next[k] - result.gradient[k];
      result.x[k] += pair.s[k];
    }
    std::copy(g_next.begin(), g_next.end(), result.gradient.begin());
    result.value = step.value;
    ++result.iterations;
    if (failures >= 2) {
      result.gradient_norm = sup_norm(result.gradient);
      if (result.gradient_norm <= options.gradient_tol) result.status = LbfgsStatus::Converged;
      return result;
    }
    const double sy = dot(pair.s, pair.y);
    if (!wolfe) {
      history.clear();
    } else if (sy > 1e-12 * dot(pair.y, pair.y)) {
      pair.rho = 1.0 / sy;
      if (static_cast<int>(history.size()) == options.memory) history.pop_front();
      history.push_back(std::move(pair));
    }
  }
}

}  // namespace dotmark
