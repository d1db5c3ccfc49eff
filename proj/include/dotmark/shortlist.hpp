#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dotmark/simplex.hpp"

namespace dotmark {

/// list_length 0 means min(n, max(25, ceil(0.02 n))) for n targets.
struct ShortlistParams {
  std::int32_t list_length = 0;
  double scan_percent = 5.0;
  std::int32_t candidate_quota = 5;

  void validate() const;
};

std::int32_t default_list_length(std::int32_t num_targets) noexcept;

/// Per source, the s cheapest targets in ascending (cost, target index) order.
struct Shortlists {
  std::int32_t list_length = 0;
  std::vector<std::vector<std::int32_t>> lists;

  std::span<const std::int32_t> operator[](std::int32_t source) const { return lists[source]; }
};

Shortlists build_shortlists(const TransportProblem& problem, const ShortlistParams& params = {});

struct ShortlistSolution : SimplexSolution {
  std::int64_t shortlist_pivots = 0;
  std::int64_t cleanup_pivots = 0;
  double init_seconds = 0.0;
  double shortlist_seconds = 0.0;
  double cleanup_seconds = 0.0;
};

/**
 * @brief Entering-arc rule restricted to the shortlists.
 *
 * Lists are visited round robin. Each list offers its most negative reduced
 * cost as one candidate. The search stops once candidate_quota candidates are
 * known, or at the end of a block of scan_percent % of the lists if at least
 * one candidate is known. The best candidate enters.
 */
class ShortlistPricer {
 public:
  ShortlistPricer(const Shortlists& lists, const ShortlistParams& params);

  std::optional<Arc> find_entering(const BasisTree& tree);
  std::optional<Arc> find_entering_bland(const BasisTree& tree) const;

 private:
  const Shortlists* lists_;
  std::int32_t block_;
  std::int32_t quota_;
  std::int32_t cursor_ = 0;
};

/// Shortlist-prioritized initialization, shortlist pivots, then dense cleanup.
ShortlistSolution solve_shortlist(const TransportProblem& problem, const ShortlistParams& params = {},
                                  const SimplexOptions& options = {});
ShortlistSolution solve_shortlist(const Instance& instance, const ShortlistParams& params = {},
                                  const SimplexOptions& options = {});

}  // namespace dotmark
