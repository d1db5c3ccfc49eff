#include "dotmark/shortlist.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <tuple>

namespace dotmark {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Offset {
  std::int32_t dr;
  std::int32_t dc;
  std::int64_t cost;
};

}  // namespace

void ShortlistParams::validate() const {
  if (list_length < 0) throw InvalidArgument("shortlist length must be positive (0 = default)");
  if (!(scan_percent > 0.0 && scan_percent <= 100.0)) throw InvalidArgument("scan percent must be in (0, 100]");
  if (candidate_quota < 1) throw InvalidArgument("candidate quota must be positive");
}

std::int32_t default_list_length(std::int32_t num_targets) noexcept {
  const auto two_percent = static_cast<std::int32_t>(std::ceil(0.02 * num_targets));
  return std::min(num_targets, std::max<std::int32_t>(25, two_percent));
}

Shortlists build_shortlists(const TransportProblem& problem, const ShortlistParams& params) {
  params.validate();
  const std::int32_t n_targets = problem.num_targets();
  const std::int32_t s =
      std::min(n_targets, params.list_length > 0 ? params.list_length : default_list_length(n_targets));
  const std::int32_t n = problem.resolution();

  // Grid offsets in (cost, dr, dc) order. Among equal costs this is the
  // order of target pixel indices, hence of target indices.
  std::vector<Offset> offsets;
  offsets.reserve(static_cast<std::size_t>(2 * n - 1) * (2 * n - 1));
  for (std::int32_t dr = -(n - 1); dr < n; ++dr)
    for (std::int32_t dc = -(n - 1); dc < n; ++dc)
      offsets.push_back({dr, dc, static_cast<std::int64_t>(dr) * dr + static_cast<std::int64_t>(dc) * dc});
  std::sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) {
    return std::tie(a.cost, a.dr, a.dc) < std::tie(b.cost, b.dr, b.dc);
  });

  Shortlists result;
  result.list_length = s;
  result.lists.resize(problem.num_sources());
  for (std::int32_t i = 0; i < problem.num_sources(); ++i) {
    auto& list = result.lists[i];
    list.reserve(s);
    const std::int32_t row = problem.source_row(i), col = problem.source_col(i);
    for (const Offset& o : offsets) {
      const std::int32_t r = row + o.dr, c = col + o.dc;
      if (r < 0 || r >= n || c < 0 || c >= n) continue;
      const std::int32_t j = problem.target_at(r * n + c);
      if (j < 0) continue;
      list.push_back(j);
      if (static_cast<std::int32_t>(list.size()) == s) break;
    }
  }
  return result;
}

ShortlistPricer::ShortlistPricer(const Shortlists& lists, const ShortlistParams& params) : lists_(&lists) {
  params.validate();
  const auto m = static_cast<std::int32_t>(lists.lists.size());
  block_ = std::max<std::int32_t>(1, static_cast<std::int32_t>(std::ceil(params.scan_percent / 100.0 * m)));
  quota_ = params.candidate_quota;
}

std::optional<Arc> ShortlistPricer::find_entering(const BasisTree& tree) {
  const auto m = static_cast<std::int32_t>(lists_->lists.size());
  std::int32_t found = 0;
  std::int64_t best_value = 0;
  Arc best{-1, -1};
  for (std::int32_t scanned = 1; scanned <= m; ++scanned) {
    const std::int32_t i = cursor_;
    cursor_ = cursor_ + 1 == m ? 0 : cursor_ + 1;
    std::int64_t list_best = 0;
    std::int32_t list_target = -1;
    for (const std::int32_t j : (*lists_)[i]) {
      const std::int64_t r = tree.reduced_cost(i, j);
      if (r < list_best) list_best = r, list_target = j;
    }
    if (list_target >= 0) {
      ++found;
      if (list_best < best_value) best_value = list_best, best = {i, list_target};
      if (found >= quota_) break;
    }
    if (found > 0 && scanned % block_ == 0) break;
  }
  if (found == 0) return std::nullopt;
  return best;
}

std::optional<Arc> ShortlistPricer::find_entering_bland(const BasisTree& tree) const {
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(lists_->lists.size()); ++i) {
    std::int32_t first = -1;
    for (const std::int32_t j : (*lists_)[i])
      if ((first < 0 || j < first) && tree.reduced_cost(i, j) < 0) first = j;
    if (first >= 0) return Arc{i, first};
  }
  return std::nullopt;
}

ShortlistSolution solve_shortlist(const TransportProblem& problem, const ShortlistParams& params,
                                  const SimplexOptions& options) {
  params.validate();
  ShortlistSolution solution;
  const auto start = Clock::now();

  const Shortlists lists = build_shortlists(problem, params);
  BasisTree tree = init_row_minimum(problem, &lists.lists);
  solution.init_seconds = seconds_since(start);

  auto phase_start = Clock::now();
  ShortlistPricer shortlist_pricer(lists, params);
  detail::run_simplex(tree, shortlist_pricer, options, solution.stats);
  solution.shortlist_pivots = solution.stats.pivots;
  solution.shortlist_seconds = seconds_since(phase_start);

  phase_start = Clock::now();
  DensePricer dense_pricer(problem);
  detail::run_simplex(tree, dense_pricer, options, solution.stats);
  solution.cleanup_pivots = solution.stats.pivots - solution.shortlist_pivots;
  solution.cleanup_seconds = seconds_since(phase_start);

  solution.stats.seconds = seconds_since(start);
  solution.stats.objective = tree.objective();
  solution.stats.optimal = true;
  solution.plan = tree.to_plan();
  solution.u.assign(tree.source_duals().begin(), tree.source_duals().end());
  solution.v.assign(tree.target_duals().begin(), tree.target_duals().end());
  return solution;
}

ShortlistSolution solve_shortlist(const Instance& instance, const ShortlistParams& params,
                                  const SimplexOptions& options) {
  const TransportProblem problem(instance);
  return solve_shortlist(problem, params, options);
}

}  // namespace dotmark
