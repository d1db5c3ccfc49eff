#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "dotmark/benchgen.hpp"
#include "dotmark/errors.hpp"
#include "dotmark/oracle.hpp"
#include "dotmark/shortlist.hpp"
#include "support.hpp"

using namespace dotmark;

namespace {

std::vector<std::int32_t> sorted_targets(const TransportProblem& p, std::int32_t i) {
  std::vector<std::int32_t> all(p.num_targets());
  std::iota(all.begin(), all.end(), 0);
  std::stable_sort(all.begin(), all.end(), [&](auto a, auto b) { return p.cost(i, a) < p.cost(i, b); });
  return all;
}

}  // namespace

TEST_CASE("default parameters") {
  CHECK(default_list_length(10) == 10);
  CHECK(default_list_length(1024) == 25);
  CHECK(default_list_length(16384) == 328);
  ShortlistParams bad;
  bad.scan_percent = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.candidate_quota = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.list_length = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("shortlists against a full sort") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);  // at most 16 targets
    const Instance inst = testing::random_instance(n, 9, seed, 0.3);
    const TransportProblem p(inst);
    for (const std::int32_t s : {1, 3, 7, p.num_targets()}) {
      ShortlistParams params;
      params.list_length = s;
      const Shortlists lists = build_shortlists(p, params);
      const std::int32_t expected = std::min(s, p.num_targets());
      CHECK(lists.list_length == expected);
      for (std::int32_t i = 0; i < p.num_sources(); ++i) {
        const auto full = sorted_targets(p, i);
        REQUIRE(lists[i].size() == static_cast<std::size_t>(expected));
        // Ties go to the smaller index, so the list is exactly the prefix of the stable sort.
        CHECK(std::equal(lists[i].begin(), lists[i].end(), full.begin()));
        for (std::size_t k = expected; k < full.size(); ++k) CHECK(p.cost(i, lists[i].back()) <= p.cost(i, full[k]));
      }
    }
  }
}

TEST_CASE("length one lists pick the coinciding pixel") {
  const GridMeasure g(4, std::vector<std::int64_t>(16, 2));
  const TransportProblem p(Instance(g, g));
  ShortlistParams params;
  params.list_length = 1;
  const Shortlists lists = build_shortlists(p, params);
  for (std::int32_t i = 0; i < p.num_sources(); ++i) CHECK(lists[i][0] == i);
}

TEST_CASE("identical measures need no cleanup") {
  const GridMeasure g(8, std::vector<std::int64_t>(64, 5));
  const ShortlistSolution s = solve_shortlist(Instance(g, g));
  CHECK(s.stats.objective == 0);
  CHECK(s.cleanup_pivots == 0);
}

TEST_CASE("exhaustive parameters give an exact solver") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Instance inst = testing::random_instance(6, 20, seed, 0.2);
    const TransportProblem p(inst);
    ShortlistParams params;
    params.list_length = p.num_targets();
    params.scan_percent = 100.0;
    params.candidate_quota = 1;
    std::int64_t last = std::numeric_limits<std::int64_t>::max();
    bool monotone = true;
    SimplexOptions options;
    options.on_pivot = [&](const BasisTree& tree, const PivotResult&) {
      monotone = monotone && tree.objective() <= last;
      last = tree.objective();
    };
    const ShortlistSolution s = solve_shortlist(p, params, options);
    CHECK(monotone);
    CHECK(s.stats.objective == oracle_solve(inst));
    CHECK(s.cleanup_pivots == 0);  // lists cover every arc
    CHECK(s.stats.pivots == s.shortlist_pivots + s.cleanup_pivots);
    CHECK(dual_feasible(p, s.u, s.v));
  }
}

TEST_CASE("agrees with the dense solver on WhiteNoise 32 x 32") {
  ClassSpec spec;
  spec.class_id = 1;
  spec.resolution = 32;
  const auto members = build_class(spec);
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      const TransportProblem p(Instance(members[a], members[b]));
      CHECK(solve_shortlist(p).stats.objective == solve_dense(p).stats.objective);
    }
  }
}

TEST_CASE("longer lists leave less to clean up") {
  std::vector<TransportProblem> corpus;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) corpus.emplace_back(testing::random_instance(12, 40, seed));
  const auto median_cleanup = [&](std::int32_t s) {
    ShortlistParams params;
    params.list_length = s;
    std::vector<std::int64_t> pivots;
    for (const auto& p : corpus) pivots.push_back(solve_shortlist(p, params).cleanup_pivots);
    std::nth_element(pivots.begin(), pivots.begin() + pivots.size() / 2, pivots.end());
    return pivots[pivots.size() / 2];
  };
  std::int64_t previous = std::numeric_limits<std::int64_t>::max();
  for (const std::int32_t s : {1, 4, 16, 64, 144}) {
    const std::int64_t m = median_cleanup(s);
    CHECK(m <= previous);
    previous = m;
  }
  CHECK(previous == 0);
}
