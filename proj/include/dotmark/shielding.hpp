#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dotmark/simplex.hpp"

namespace dotmark {

/// Sparse arc set in CSR form: the allowed targets of source i, ascending.
class Neighborhood {
 public:
  Neighborhood() = default;
  Neighborhood(std::vector<std::int64_t> offsets, std::vector<std::int32_t> targets);

  /// Every pair (i, j).
  static Neighborhood full(const TransportProblem& problem);

  std::int32_t num_sources() const noexcept { return static_cast<std::int32_t>(offsets_.size()) - 1; }
  std::span<const std::int32_t> operator[](std::int32_t source) const {
    return {targets_.data() + offsets_[source], static_cast<std::size_t>(offsets_[source + 1] - offsets_[source])};
  }
  bool contains(std::int32_t source, std::int32_t target) const;
  std::int64_t total_pairs() const noexcept { return static_cast<std::int64_t>(targets_.size()); }

  /// Union with extra arcs (kept sorted and unique). Adds empty rows as needed to hold every source.
  Neighborhood with_arcs(std::span<const Arc> extra) const;

 private:
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> targets_;
};

/**
 * @brief Shielding neighbourhood of a basic solution for squared Euclidean cost.
 *
 * A pair (x, y) is left out only if a grid 4-neighbour x_s of x has an
 * assigned target y_s with <x_s - x, y - y_s> > 0. For a unit step this test
 * is a bound on one coordinate of y, so the kept targets of x are a
 * rectangle, plus x's own arcs and every target assigned to its neighbours.
 * "Assigned" means joined by a basic arc, degenerate ones included: the
 * shortcut argument only needs u + v = c on the shielding arc.
 */
Neighborhood construct_shielding(const TransportProblem& problem, std::span<const BasicArc> assigned);
Neighborhood construct_shielding(const BasisTree& tree);

enum class RestrictedPricing {
  RowMinimum,   ///< the dense solver's rule applied to the sparse rows
  BlockSearch,  ///< best arc among whole rows covering at least block_factor * sqrt(|N|) arcs
};

/**
 * @brief Pricing over a sparse arc set; rows are visited round robin.
 *
 * RowMinimum returns the minimum of the first row holding a negative reduced
 * cost. BlockSearch keeps scanning whole rows until the block size is
 * reached and returns the best arc seen, which needs far fewer pivots.
 */
class SparsePricer {
 public:
  explicit SparsePricer(const Neighborhood& arcs, RestrictedPricing rule = RestrictedPricing::RowMinimum,
                        double block_factor = 1.0);

  std::optional<Arc> find_entering(const BasisTree& tree);
  std::optional<Arc> find_entering_bland(const BasisTree& tree) const;

 private:
  const Neighborhood* arcs_;
  std::int64_t block_;
  std::int32_t cursor_ = 0;
};

struct RestrictedOptions {
  RestrictedPricing pricing = RestrictedPricing::BlockSearch;
  double block_factor = 1.0;
};

/// Pivot the warm basis to optimality over the arcs in N. Throws InvariantError if a basic arc is not in N.
SolveStats solve_restricted(BasisTree& tree, const Neighborhood& arcs, const SimplexOptions& options = {},
                            const RestrictedOptions& restricted = {});

struct ShieldingIteration {
  std::int64_t neighborhood_pairs = 0;
  std::int64_t pivots = 0;
  std::int64_t objective = 0;  // after the restricted solve
  double seconds = 0.0;
};

struct ShieldingOptions {
  SimplexOptions simplex;
  RestrictedOptions restricted;
  std::int32_t max_iterations = 1000;
};

struct ShieldingSolution : SimplexSolution {
  std::vector<ShieldingIteration> iterations;  // one entry per restricted solve
  /// Times the final dense check found a violation and the loop resumed. Zero when the construction is sound.
  std::int32_t certificate_fallbacks = 0;
  double init_seconds = 0.0;
};

/**
 * @brief Shielding neighbourhood method.
 *
 * Starts from the modified row-minimum solution and alternates restricted
 * solves with rebuilding N. Stops when the incumbent has no negative reduced
 * cost on the rebuilt N, i.e. it is optimal for two successive
 * neighbourhoods. A dense reduced-cost check then certifies the result.
 */
ShieldingSolution solve_shielded(const TransportProblem& problem, const ShieldingOptions& options = {});
ShieldingSolution solve_shielded(const Instance& instance, const ShieldingOptions& options = {});

}  // namespace dotmark
