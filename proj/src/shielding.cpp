#include "dotmark/shielding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace dotmark {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Neighborhood::Neighborhood(std::vector<std::int64_t> offsets, std::vector<std::int32_t> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != static_cast<std::int64_t>(targets_.size()))
    throw InvalidArgument("Neighborhood: malformed offsets");
}

Neighborhood Neighborhood::full(const TransportProblem& problem) {
  const std::int32_t m = problem.num_sources(), n = problem.num_targets();
  std::vector<std::int64_t> offsets(m + 1);
  std::vector<std::int32_t> targets(static_cast<std::size_t>(m) * n);
  for (std::int32_t i = 0; i < m; ++i) {
    offsets[i + 1] = offsets[i] + n;
    for (std::int32_t j = 0; j < n; ++j) targets[static_cast<std::size_t>(i) * n + j] = j;
  }
  return {std::move(offsets), std::move(targets)};
}

bool Neighborhood::contains(std::int32_t source, std::int32_t target) const {
  if (source < 0 || source >= num_sources()) return false;
  const auto row = (*this)[source];
  return std::binary_search(row.begin(), row.end(), target);
}

Neighborhood Neighborhood::with_arcs(std::span<const Arc> extra) const {
  std::int32_t m = num_sources();
  for (const Arc& a : extra) {
    if (a.source < 0 || a.target < 0) throw InvalidArgument("Neighborhood: negative arc index");
    m = std::max(m, a.source + 1);
  }
  std::vector<std::vector<std::int32_t>> added(m);
  for (const Arc& a : extra) added[a.source].push_back(a.target);
  std::vector<std::int64_t> offsets(m + 1, 0);
  std::vector<std::int32_t> targets;
  targets.reserve(targets_.size() + extra.size());
  for (std::int32_t i = 0; i < m; ++i) {
    auto& more = added[i];
    if (i < num_sources()) {
      const auto row = (*this)[i];
      more.insert(more.end(), row.begin(), row.end());
    }
    std::sort(more.begin(), more.end());
    more.erase(std::unique(more.begin(), more.end()), more.end());
    targets.insert(targets.end(), more.begin(), more.end());
    offsets[i + 1] = static_cast<std::int64_t>(targets.size());
  }
  return {std::move(offsets), std::move(targets)};
}

Neighborhood construct_shielding(const TransportProblem& problem, std::span<const BasicArc> assigned) {
  const std::int32_t m = problem.num_sources();
  const std::int32_t n = problem.resolution();

  // Assigned targets per source and their bounding box.
  std::vector<std::vector<std::int32_t>> own(m);
  for (const BasicArc& a : assigned) {
    if (a.source < 0 || a.source >= m || a.target < 0 || a.target >= problem.num_targets())
      throw InvalidArgument("construct_shielding: arc out of range");
    own[a.source].push_back(a.target);
  }
  std::vector<std::int32_t> min_row(m, n), max_row(m, -1), min_col(m, n), max_col(m, -1);
  for (std::int32_t i = 0; i < m; ++i) {
    for (const std::int32_t j : own[i]) {
      min_row[i] = std::min(min_row[i], problem.target_row(j));
      max_row[i] = std::max(max_row[i], problem.target_row(j));
      min_col[i] = std::min(min_col[i], problem.target_col(j));
      max_col[i] = std::max(max_col[i], problem.target_col(j));
    }
  }
  auto source_at = [&](std::int32_t r, std::int32_t c) {
    return (r < 0 || r >= n || c < 0 || c >= n) ? -1 : problem.source_at(r * n + c);
  };

  std::vector<std::int64_t> offsets(m + 1, 0);
  std::vector<std::int32_t> targets;
  std::vector<std::int32_t> row_targets;
  for (std::int32_t i = 0; i < m; ++i) {
    const std::int32_t r = problem.source_row(i), c = problem.source_col(i);
    const std::int32_t up = source_at(r - 1, c), down = source_at(r + 1, c);
    const std::int32_t left = source_at(r, c - 1), right = source_at(r, c + 1);
    // Neighbour one row up shields every y whose row is below one of its targets' rows, etc.
    const std::int32_t r_lo = up >= 0 && max_row[up] >= 0 ? max_row[up] : 0;
    const std::int32_t r_hi = down >= 0 && max_row[down] >= 0 ? min_row[down] : n - 1;
    const std::int32_t c_lo = left >= 0 && max_col[left] >= 0 ? max_col[left] : 0;
    const std::int32_t c_hi = right >= 0 && max_col[right] >= 0 ? min_col[right] : n - 1;

    row_targets.clear();
    for (std::int32_t y = r_lo; y <= r_hi; ++y)
      for (std::int32_t x = c_lo; x <= c_hi; ++x)
        if (const std::int32_t j = problem.target_at(y * n + x); j >= 0) row_targets.push_back(j);
    row_targets.insert(row_targets.end(), own[i].begin(), own[i].end());
    for (const std::int32_t s : {up, down, left, right})
      if (s >= 0) row_targets.insert(row_targets.end(), own[s].begin(), own[s].end());
    std::sort(row_targets.begin(), row_targets.end());
    row_targets.erase(std::unique(row_targets.begin(), row_targets.end()), row_targets.end());
    targets.insert(targets.end(), row_targets.begin(), row_targets.end());
    offsets[i + 1] = static_cast<std::int64_t>(targets.size());
  }
  return {std::move(offsets), std::move(targets)};
}

Neighborhood construct_shielding(const BasisTree& tree) {
  const auto arcs = tree.basic_arcs();
  return construct_shielding(tree.problem(), arcs);
}

SparsePricer::SparsePricer(const Neighborhood& arcs, RestrictedPricing rule, double block_factor) : arcs_(&arcs) {
  if (!(block_factor > 0.0)) throw InvalidArgument("SparsePricer: block factor must be positive");
  block_ = rule == RestrictedPricing::RowMinimum
               ? 1
               : std::max<std::int64_t>(1, std::llround(block_factor * std::sqrt(static_cast<double>(arcs.total_pairs()))));
}

std::optional<Arc> SparsePricer::find_entering(const BasisTree& tree) {
  const std::int32_t m = arcs_->num_sources();
  std::int64_t best = 0;
  Arc best_arc{-1, -1};
  std::int64_t scanned = 0;
  for (std::int32_t k = 0; k < m; ++k) {
    const std::int32_t i = cursor_;
    cursor_ = cursor_ + 1 == m ? 0 : cursor_ + 1;
    const auto row = (*arcs_)[i];
    for (const std::int32_t j : row) {
      const std::int64_t r = tree.reduced_cost(i, j);
      if (r < best) best = r, best_arc = {i, j};
    }
    scanned += static_cast<std::int64_t>(row.size());
    if (best_arc.source >= 0 && scanned >= block_) break;
  }
  if (best_arc.source < 0) return std::nullopt;
  return best_arc;
}

std::optional<Arc> SparsePricer::find_entering_bland(const BasisTree& tree) const {
  for (std::int32_t i = 0; i < arcs_->num_sources(); ++i)
    for (const std::int32_t j : (*arcs_)[i])
      if (tree.reduced_cost(i, j) < 0) return Arc{i, j};
  return std::nullopt;
}

SolveStats solve_restricted(BasisTree& tree, const Neighborhood& arcs, const SimplexOptions& options,
                            const RestrictedOptions& restricted) {
  if (arcs.num_sources() != tree.num_sources()) throw InvalidArgument("solve_restricted: neighbourhood size mismatch");
  for (const BasicArc& a : tree.basic_arcs())
    if (!arcs.contains(a.source, a.target))
      throw InvariantError("solve_restricted: warm basis arc outside the neighbourhood");
  const auto start = Clock::now();
  SolveStats stats;
  SparsePricer pricer(arcs, restricted.pricing, restricted.block_factor);
  detail::run_simplex(tree, pricer, options, stats);
  stats.seconds = seconds_since(start);
  stats.objective = tree.objective();
  stats.optimal = false;  // optimal over N only
  return stats;
}

namespace {

bool has_negative_arc(const BasisTree& tree, const Neighborhood& arcs) {
  for (std::int32_t i = 0; i < arcs.num_sources(); ++i)
    for (const std::int32_t j : arcs[i])
      if (tree.reduced_cost(i, j) < 0) return true;
  return false;
}

/// Row minima of every row with a negative reduced cost.
std::vector<Arc> dense_violations(const BasisTree& tree) {
  std::vector<Arc> out;
  for (std::int32_t i = 0; i < tree.num_sources(); ++i)
    if (const kernels::RowMin best = row_minimum(tree, i); best.value < 0) out.push_back({i, best.index});
  return out;
}

}  // namespace

ShieldingSolution solve_shielded(const TransportProblem& problem, const ShieldingOptions& options) {
  if (options.max_iterations < 1) throw InvalidArgument("shielding: max_iterations must be positive");
  ShieldingSolution solution;
  const auto start = Clock::now();
  BasisTree tree = init_row_minimum(problem);
  solution.init_seconds = seconds_since(start);

  Neighborhood arcs = construct_shielding(tree);
  while (true) {
    if (static_cast<std::int32_t>(solution.iterations.size()) >= options.max_iterations)
      throw IterationLimit("shielding: iteration cap reached");
    const auto iteration_start = Clock::now();
    const SolveStats restricted = solve_restricted(tree, arcs, options.simplex, options.restricted);
    solution.stats.pivots += restricted.pivots;
    solution.stats.degenerate_pivots += restricted.degenerate_pivots;
    solution.stats.bland_pivots += restricted.bland_pivots;
    solution.iterations.push_back({arcs.total_pairs(), restricted.pivots, tree.objective(), 0.0});

    arcs = construct_shielding(tree);
    const bool stable = !has_negative_arc(tree, arcs);
    solution.iterations.back().seconds = seconds_since(iteration_start);
    if (!stable) continue;

    const std::vector<Arc> violations = dense_violations(tree);
    if (violations.empty()) break;
    ++solution.certificate_fallbacks;
    arcs = arcs.with_arcs(violations);
  }

  solution.stats.seconds = seconds_since(start);
  solution.stats.objective = tree.objective();
  solution.stats.optimal = true;
  solution.plan = tree.to_plan();
  solution.u.assign(tree.source_duals().begin(), tree.source_duals().end());
  solution.v.assign(tree.target_duals().begin(), tree.target_duals().end());
  return solution;
}

ShieldingSolution solve_shielded(const Instance& instance, const ShieldingOptions& options) {
  const TransportProblem problem(instance);
  return solve_shielded(problem, options);
}

}  // namespace dotmark
