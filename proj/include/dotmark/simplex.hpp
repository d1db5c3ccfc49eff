#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dotmark/basis_tree.hpp"
#include "dotmark/errors.hpp"
#include "dotmark/kernels.hpp"
#include "dotmark/measures.hpp"
#include "dotmark/problem.hpp"

namespace dotmark {

struct SolveStats {
  std::int64_t pivots = 0;
  std::int64_t degenerate_pivots = 0;
  std::int64_t bland_pivots = 0;
  double seconds = 0.0;
  std::int64_t objective = 0;  // exact, squared pixel units
  bool optimal = false;
};

struct SimplexOptions {
  /// Pivot cap; 0 picks 2000 * (m + n) + 10^6. Exceeding it throws IterationLimit.
  std::int64_t max_pivots = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule; 0 picks 10 * (m + n).
  std::int64_t degenerate_run_limit = 0;
  /// Called after every pivot. Test hook; leave empty for timing runs.
  std::function<void(const BasisTree&, const PivotResult&)> on_pivot;
};

/// An optimal plan with its certifying duals (indexed like TransportProblem).
struct SimplexSolution {
  TransportPlan plan;
  SolveStats stats;
  std::vector<std::int64_t> u;
  std::vector<std::int64_t> v;
};

/**
 * @brief Modified row-minimum rule.
 *
 * Sweeps over sources that still have mass; each source ships as much as
 * possible to its cheapest target that still has demand (ties: smallest
 * target index). Sweeps repeat until all sources are empty. When priority
 * lists are given, a source first looks through its list and only falls back
 * to the whole grid once every listed target is full. The resulting forest is
 * completed to a spanning tree with zero-flow arcs.
 */
BasisTree init_row_minimum(const TransportProblem& problem,
                           const std::vector<std::vector<std::int32_t>>* priority = nullptr);

/**
 * @brief Row-minimum entering-arc rule over the complete bipartite graph.
 *
 * Rows are scanned round robin starting after the row of the previous pivot.
 * The first row containing a negative reduced cost is finished and its
 * minimum returned.
 */
class DensePricer {
 public:
  explicit DensePricer(const TransportProblem& problem) : problem_(&problem) {}

  std::optional<Arc> find_entering(const BasisTree& tree);
  /// Smallest-index arc with negative reduced cost.
  std::optional<Arc> find_entering_bland(const BasisTree& tree) const;

  std::int32_t cursor() const noexcept { return cursor_; }

 private:
  const TransportProblem* problem_;
  std::int32_t cursor_ = 0;
};

/// Least reduced cost over a single row, via the dispatched SIMD kernel.
kernels::RowMin row_minimum(const BasisTree& tree, std::int32_t source);

/// True iff c_ij - u_i - v_j >= 0 for every pair (exhaustive).
bool dual_feasible(const TransportProblem& problem, std::span<const std::int64_t> u, std::span<const std::int64_t> v);

/// Count of pairs with negative reduced cost (exhaustive).
std::int64_t count_negative_reduced_costs(const TransportProblem& problem, std::span<const std::int64_t> u,
                                          std::span<const std::int64_t> v);

namespace detail {

inline std::int64_t pivot_cap(const BasisTree& tree, const SimplexOptions& options) {
  if (options.max_pivots > 0) return options.max_pivots;
  return 2000 * static_cast<std::int64_t>(tree.num_sources() + tree.num_targets()) + 1000000;
}

/// Pivot until the pricer finds no improving arc. Shared by all exact solvers.
template <class Pricer>
void run_simplex(BasisTree& tree, Pricer& pricer, const SimplexOptions& options, SolveStats& stats) {
  const std::int64_t cap = pivot_cap(tree, options);
  const std::int64_t run_limit = options.degenerate_run_limit > 0
                                     ? options.degenerate_run_limit
                                     : 10 * static_cast<std::int64_t>(tree.num_sources() + tree.num_targets());
  std::int64_t degenerate_run = 0;
  bool bland = false;
  while (true) {
    const std::optional<Arc> entering = bland ? pricer.find_entering_bland(tree) : pricer.find_entering(tree);
    if (!entering) break;
    const PivotResult result = tree.pivot(*entering, bland ? LeavingRule::Bland : LeavingRule::DepthThenIndex);
    ++stats.pivots;
    if (bland) ++stats.bland_pivots;
    if (result.degenerate()) {
      ++stats.degenerate_pivots;
      if (++degenerate_run > run_limit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
    if (options.on_pivot) options.on_pivot(tree, result);
    if (stats.pivots >= cap) throw IterationLimit("simplex: pivot cap reached (suspected cycling)");
  }
}

}  // namespace detail

/// Transportation simplex on the full problem.
SimplexSolution solve_dense(const Instance& instance, const SimplexOptions& options = {});
SimplexSolution solve_dense(const TransportProblem& problem, const SimplexOptions& options = {});

}  // namespace dotmark
