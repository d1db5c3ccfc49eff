#include "dotmark/simplex.hpp"

#include <chrono>
#include <numeric>

namespace dotmark {

namespace {

/// Cheapest target with remaining demand, by expanding square rings on the grid.
class NearestAvailable {
 public:
  explicit NearestAvailable(const TransportProblem& problem)
      : problem_(problem), n_(problem.resolution()), available_(static_cast<std::size_t>(n_) * n_, -1) {
    for (std::int32_t j = 0; j < problem.num_targets(); ++j) available_[problem.target_pixel(j)] = j;
    remaining_ = problem.num_targets();
  }

  void remove(std::int32_t j) {
    available_[problem_.target_pixel(j)] = -1;
    --remaining_;
  }

  std::int32_t query(std::int32_t row, std::int32_t col) const {
    std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
    std::int32_t best = -1;
    auto visit = [&](std::int32_t r, std::int32_t c) {
      const std::int32_t j = available_[static_cast<std::size_t>(r) * n_ + c];
      if (j < 0) return;
      const std::int64_t dr = r - row, dc = c - col;
      const std::int64_t cost = dr * dr + dc * dc;
      if (cost < best_cost || (cost == best_cost && j < best)) {
        best_cost = cost;
        best = j;
      }
    };
    for (std::int32_t d = 0; d < n_; ++d) {
      if (static_cast<std::int64_t>(d) * d > best_cost) break;
      const std::int32_t r0 = row - d, r1 = row + d, c0 = std::max(col - d, 0), c1 = std::min(col + d, n_ - 1);
      if (d == 0) {
        visit(row, col);
        continue;
      }
      if (r0 >= 0) {
        for (std::int32_t c = c0; c <= c1; ++c) visit(r0, c);
      }
      if (r1 < n_) {
        for (std::int32_t c = c0; c <= c1; ++c) visit(r1, c);
      }
      const std::int32_t ra = std::max(r0 + 1, 0), rb = std::min(r1 - 1, n_ - 1);
      for (std::int32_t r = ra; r <= rb; ++r) {
        if (col - d >= 0) visit(r, col - d);
        if (col + d < n_) visit(r, col + d);
      }
    }
    return best;
  }

  std::int32_t remaining() const noexcept { return remaining_; }

 private:
  const TransportProblem& problem_;
  std::int32_t n_;
  std::vector<std::int32_t> available_;
  std::int32_t remaining_;
};

struct DisjointSets {
  explicit DisjointSets(std::int32_t size) : parent(size) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) { parent[find(a)] = find(b); }
  std::vector<std::int32_t> parent;
};

}  // namespace

BasisTree init_row_minimum(const TransportProblem& problem, const std::vector<std::vector<std::int32_t>>* priority) {
  const std::int32_t m = problem.num_sources();
  const std::int32_t n = problem.num_targets();
  std::vector<std::int64_t> supply = problem.supplies();
  std::vector<std::int64_t> demand = problem.demands();
  NearestAvailable nearest(problem);
  std::vector<std::size_t> list_pos(priority ? m : 0, 0);

  std::vector<BasicArc> arcs;
  arcs.reserve(m + n - 1);
  std::vector<std::int32_t> active(m);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::int32_t> still_active;
  while (!active.empty()) {
    still_active.clear();
    for (const std::int32_t i : active) {
      std::int32_t j = -1;
      if (priority) {
        // Lists are sorted by cost, so the first target with demand is the listed minimum.
        const auto& list = (*priority)[i];
        auto& pos = list_pos[i];
        while (pos < list.size() && demand[list[pos]] == 0) ++pos;
        if (pos < list.size()) j = list[pos];
      }
      if (j < 0) j = nearest.query(problem.source_row(i), problem.source_col(i));
      if (j < 0) throw InvalidArgument("init_row_minimum: unbalanced problem");
      const std::int64_t amount = std::min(supply[i], demand[j]);
      arcs.push_back({i, j, amount});
      supply[i] -= amount;
      demand[j] -= amount;
      if (demand[j] == 0) nearest.remove(j);
      if (supply[i] > 0) still_active.push_back(i);
    }
    active.swap(still_active);
  }
  for (std::int32_t j = 0; j < n; ++j) {
    if (demand[j] != 0) throw InvalidArgument("init_row_minimum: unbalanced problem");
  }

  // Each greedy arc empties a node, so the arcs form a forest. Join the trees
  // with zero-flow arcs from one component's source to the next one's target.
  DisjointSets sets(m + n);
  for (const auto& a : arcs) sets.unite(a.source, m + a.target);
  std::vector<std::int32_t> source_of(m + n, -1), target_of(m + n, -1);
  std::vector<std::int32_t> roots;
  for (std::int32_t i = 0; i < m; ++i) {
    const std::int32_t root = sets.find(i);
    if (source_of[root] < 0) {
      source_of[root] = i;
      roots.push_back(root);
    }
  }
  for (std::int32_t j = 0; j < n; ++j) {
    const std::int32_t root = sets.find(m + j);
    if (target_of[root] < 0) target_of[root] = j;
  }
  for (std::size_t k = 0; k + 1 < roots.size(); ++k) {
    arcs.push_back({source_of[roots[k]], target_of[roots[k + 1]], 0});
  }
  return BasisTree(problem, arcs);
}

kernels::RowMin row_minimum(const BasisTree& tree, std::int32_t source) {
  const TransportProblem& problem = tree.problem();
  return kernels::row_min_reduced_cost({problem.source_row(source), problem.source_col(source),
                                        tree.u(source) - problem.cost_offset(), problem.target_rows(),
                                        problem.target_cols(), tree.target_duals()});
}

std::optional<Arc> DensePricer::find_entering(const BasisTree& tree) {
  const std::int32_t m = problem_->num_sources();
  std::int32_t i = cursor_;
  for (std::int32_t k = 0; k < m; ++k) {
    const kernels::RowMin best = row_minimum(tree, i);
    if (best.value < 0) {
      cursor_ = i + 1 == m ? 0 : i + 1;
      return Arc{i, best.index};
    }
    if (++i == m) i = 0;
  }
  return std::nullopt;
}

std::optional<Arc> DensePricer::find_entering_bland(const BasisTree& tree) const {
  const std::int32_t m = problem_->num_sources();
  const std::int32_t n = problem_->num_targets();
  for (std::int32_t i = 0; i < m; ++i) {
    if (row_minimum(tree, i).value >= 0) continue;
    for (std::int32_t j = 0; j < n; ++j) {
      if (tree.reduced_cost(i, j) < 0) return Arc{i, j};
    }
  }
  return std::nullopt;
}

std::int64_t count_negative_reduced_costs(const TransportProblem& problem, std::span<const std::int64_t> u,
                                          std::span<const std::int64_t> v) {
  std::int64_t count = 0;
  for (std::int32_t i = 0; i < problem.num_sources(); ++i) {
    for (std::int32_t j = 0; j < problem.num_targets(); ++j) {
      if (problem.cost(i, j) - u[i] - v[j] < 0) ++count;
    }
  }
  return count;
}

bool dual_feasible(const TransportProblem& problem, std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  for (std::int32_t i = 0; i < problem.num_sources(); ++i) {
    const kernels::RowMin best = kernels::row_min_reduced_cost(
        {problem.source_row(i), problem.source_col(i), u[i] - problem.cost_offset(), problem.target_rows(),
         problem.target_cols(), v});
    if (best.value < 0) return false;
  }
  return true;
}

SimplexSolution solve_dense(const TransportProblem& problem, const SimplexOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  BasisTree tree = init_row_minimum(problem);
  DensePricer pricer(problem);
  SimplexSolution solution;
  detail::run_simplex(tree, pricer, options, solution.stats);
  solution.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  solution.stats.objective = tree.objective();
  solution.stats.optimal = true;
  solution.plan = tree.to_plan();
  solution.u.assign(tree.source_duals().begin(), tree.source_duals().end());
  solution.v.assign(tree.target_duals().begin(), tree.target_duals().end());
  return solution;
}

SimplexSolution solve_dense(const Instance& instance, const SimplexOptions& options) {
  const TransportProblem problem(instance);
  return solve_dense(problem, options);
}

}  // namespace dotmark
