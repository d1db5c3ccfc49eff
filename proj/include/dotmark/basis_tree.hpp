#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dotmark/problem.hpp"

namespace dotmark {

struct BasicArc {
  std::int32_t source;
  std::int32_t target;
  std::int64_t flow;  // zero for degenerate basic arcs
};

/// How the leaving arc is picked among the arcs that block the cycle.
enum class LeavingRule {
  DepthThenIndex,  ///< child node closest to the root, then smallest arc index
  Bland,           ///< smallest arc index (source * num_targets + target)
};

struct PivotResult {
  std::int64_t theta = 0;           // mass shifted around the cycle
  std::int64_t reduced_cost = 0;    // of the entering arc (negative)
  std::int64_t objective_change = 0;
  Arc leaving{-1, -1};
  bool degenerate() const noexcept { return theta == 0; }
};

/**
 * @brief Spanning-tree basis of a transportation problem.
 *
 * Nodes 0..m-1 are sources and m..m+n-1 are targets; the root is source 0.
 * Each non-root node stores the basic arc to its parent and the flow on it.
 * Nodes are also threaded in preorder with subtree sizes and last
 * descendants, so a subtree is one contiguous run of the thread: re-hanging
 * it costs time in the length of the cycle and shifting its duals is a
 * linear walk. Duals satisfy u_i + v_j = c_ij on every basic arc with u_0 = 0.
 */
class BasisTree {
 public:
  /// Builds the tree from m + n - 1 arcs. Throws InvariantError unless they form a spanning tree.
  BasisTree(const TransportProblem& problem, std::span<const BasicArc> arcs);

  const TransportProblem& problem() const noexcept { return *problem_; }
  std::int32_t num_sources() const noexcept { return m_; }
  std::int32_t num_targets() const noexcept { return n_; }

  std::int64_t u(std::int32_t i) const noexcept { return pot_[i]; }
  std::int64_t v(std::int32_t j) const noexcept { return pot_[m_ + j]; }
  std::span<const std::int64_t> source_duals() const noexcept { return {pot_.data(), static_cast<std::size_t>(m_)}; }
  std::span<const std::int64_t> target_duals() const noexcept {
    return {pot_.data() + m_, static_cast<std::size_t>(n_)};
  }

  std::int64_t reduced_cost(std::int32_t i, std::int32_t j) const noexcept {
    return problem_->cost(i, j) - pot_[i] - pot_[m_ + j];
  }
  bool is_basic(std::int32_t i, std::int32_t j) const noexcept {
    return parent_[m_ + j] == i || parent_[i] == m_ + j;
  }

  /// Recompute all duals from the tree (root dual fixed to 0).
  void compute_duals();

  /// Enter arc e (non-basic, negative reduced cost) and restore the tree.
  PivotResult pivot(Arc entering, LeavingRule rule = LeavingRule::DepthThenIndex);

  /// Current objective, maintained incrementally.
  std::int64_t objective() const noexcept { return objective_; }
  std::int64_t recompute_objective() const;

  std::vector<BasicArc> basic_arcs() const;
  /// Targets joined to source i by a basic arc.
  template <class F>
  void for_each_basic_target(std::int32_t i, F&& f) const {
    if (parent_[i] >= m_) f(parent_[i] - m_, flow_[i]);
    const std::int32_t stop = thread_[last_[i]];
    for (std::int32_t c = thread_[i]; c != stop; c = thread_[last_[c]]) f(c - m_, flow_[c]);
  }

  /// Positive-flow arcs mapped back to grid pixels.
  TransportPlan to_plan() const;

  /// Exhaustive structural check: spanning tree, thread order, marginals, dual equalities.
  void check_invariants() const;

 private:
  std::int64_t arc_index(std::int32_t child) const noexcept;
  void build_thread();

  const TransportProblem* problem_;
  std::int32_t m_;
  std::int32_t n_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> thread_;      // preorder successor, circular through the root
  std::vector<std::int32_t> rev_thread_;  // preorder predecessor
  std::vector<std::int32_t> last_;        // last node of the subtree in preorder
  std::vector<std::int32_t> size_;        // subtree size
  std::vector<std::int64_t> flow_;  // flow on the arc (node, parent)
  std::vector<std::int64_t> pot_;
  std::int64_t objective_ = 0;

  // scratch, reused across pivots
  std::vector<std::int32_t> path_source_side_;
  std::vector<std::int32_t> path_target_side_;
  std::vector<std::int64_t> saved_flow_;
  std::vector<std::int32_t> saved_size_;
  std::vector<std::pair<std::int32_t, std::int32_t>> segments_;
};

}  // namespace dotmark
