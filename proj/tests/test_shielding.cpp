#include <array>

#include "doctest.h"
#include "dotmark/benchgen.hpp"
#include "dotmark/errors.hpp"
#include "dotmark/oracle.hpp"
#include "dotmark/shielding.hpp"
#include "support.hpp"

using namespace dotmark;

namespace {

constexpr std::array<std::array<int, 2>, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// Every basic target of each source, indexed by source.
std::vector<std::vector<std::int32_t>> assigned_targets(const TransportProblem& p, const std::vector<BasicArc>& arcs) {
  std::vector<std::vector<std::int32_t>> out(p.num_sources());
  for (const BasicArc& a : arcs) out[a.source].push_back(a.target);
  return out;
}

// Calls f(x_s, y_s) for every basic arc leaving a 4-neighbour of source x.
template <class F>
void for_each_neighbour_arc(const TransportProblem& p, const std::vector<std::vector<std::int32_t>>& assigned,
                            std::int32_t x, F&& f) {
  const int n = p.resolution();
  for (const auto& step : kSteps) {
    const int r = p.source_row(x) + step[0];
    const int c = p.source_col(x) + step[1];
    if (r < 0 || c < 0 || r >= n || c >= n) continue;
    const std::int32_t xs = p.source_at(r * n + c);
    if (xs < 0) continue;
    for (const std::int32_t ys : assigned[xs]) f(xs, ys);
  }
}

std::int64_t shield_product(const TransportProblem& p, std::int32_t x, std::int32_t y, std::int32_t xs,
                            std::int32_t ys) {
  return static_cast<std::int64_t>(p.source_row(xs) - p.source_row(x)) * (p.target_row(y) - p.target_row(ys)) +
         static_cast<std::int64_t>(p.source_col(xs) - p.source_col(x)) * (p.target_col(y) - p.target_col(ys));
}

}  // namespace

TEST_CASE("neighbourhood container") {
  const Neighborhood nb({0, 2, 3}, {1, 4, 0});
  CHECK(nb.num_sources() == 2);
  CHECK(nb.total_pairs() == 3);
  CHECK(nb.contains(0, 4));
  CHECK_FALSE(nb.contains(1, 4));
  const std::array<Arc, 2> extra{Arc{1, 4}, Arc{0, 1}};
  const Neighborhood more = nb.with_arcs(extra);
  CHECK(more.total_pairs() == 4);
  CHECK(more.contains(1, 4));
  CHECK_FALSE(more.contains(7, 0));
  CHECK(nb.with_arcs(std::array<Arc, 1>{Arc{3, 2}}).num_sources() == 4);
}

TEST_CASE("identity plan keeps the 3 x 3 box") {
  const int n = 5;
  const GridMeasure g(n, std::vector<std::int64_t>(n * n, 1));
  const TransportProblem p(Instance(g, g));
  std::vector<BasicArc> identity;
  for (std::int32_t i = 0; i < p.num_sources(); ++i) identity.push_back({i, i, 1});
  const Neighborhood nb = construct_shielding(p, identity);
  for (std::int32_t x = 0; x < p.num_sources(); ++x) {
    CHECK(nb.contains(x, x));
    for (std::int32_t y = 0; y < p.num_targets(); ++y) {
      const int dr = std::abs(p.source_row(x) - p.target_row(y));
      const int dc = std::abs(p.source_col(x) - p.target_col(y));
      CHECK(nb.contains(x, y) == (dr <= 1 && dc <= 1));
    }
  }
}

TEST_CASE("excluded pairs are shielded and have a shortcut") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = seed % 2 ? 5 : 4;
    const Instance inst = testing::random_instance(n, 12, seed, 0.25);
    const TransportProblem p(inst);
    const BasisTree tree = init_row_minimum(p);
    const auto arcs = tree.basic_arcs();
    const auto assigned = assigned_targets(p, arcs);
    const Neighborhood nb = construct_shielding(p, arcs);
    for (const BasicArc& a : arcs) CHECK(nb.contains(a.source, a.target));
    for (std::int32_t x = 0; x < p.num_sources(); ++x) {
      for_each_neighbour_arc(p, assigned, x, [&](std::int32_t, std::int32_t ys) { CHECK(nb.contains(x, ys)); });
      for (std::int32_t y = 0; y < p.num_targets(); ++y) {
        if (nb.contains(x, y)) continue;
        bool shielded = false;
        bool shortcut = false;
        const std::int64_t direct = p.cost(x, y);
        for_each_neighbour_arc(p, assigned, x, [&](std::int32_t xs, std::int32_t ys) {
          shielded = shielded || shield_product(p, x, y, xs, ys) > 0;
          // Rows and columns coincide for sources and targets of the same pixel grid.
          const std::int64_t dr1 = p.source_row(x) - p.target_row(ys), dc1 = p.source_col(x) - p.target_col(ys);
          const std::int64_t dr2 = p.source_row(xs) - p.target_row(y), dc2 = p.source_col(xs) - p.target_col(y);
          const std::int64_t route = dr1 * dr1 + dc1 * dc1 + dr2 * dr2 + dc2 * dc2 - p.cost(xs, ys);
          shortcut = shortcut || route <= direct;
        });
        CHECK(shielded);
        CHECK(shortcut);
      }
    }
  }
}

TEST_CASE("restricted solves") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = testing::random_instance(5, 20, seed, 0.2);
    const TransportProblem p(inst);
    const std::int64_t optimum = oracle_solve(inst);

    SUBCASE("the full product set is the dense problem") {
      BasisTree tree = init_row_minimum(p);
      const Neighborhood full = Neighborhood::full(p);
      for (const auto rule : {RestrictedPricing::RowMinimum, RestrictedPricing::BlockSearch}) {
        BasisTree t = tree;
        solve_restricted(t, full, {}, {rule, 1.0});
        CHECK(t.objective() == optimum);
      }
    }
    SUBCASE("fewer arcs never beat the optimum") {
      BasisTree tree = init_row_minimum(p);
      const std::int64_t start = tree.objective();
      const Neighborhood nb = construct_shielding(tree);
      solve_restricted(tree, nb);
      CHECK(tree.objective() >= optimum);
      CHECK(tree.objective() <= start);
    }
    SUBCASE("containing an optimal plan is enough") {
      BasisTree tree = init_row_minimum(p);
      const SimplexSolution best = solve_dense(p);
      std::vector<Arc> arcs;
      for (const auto& e : best.plan.entries) arcs.push_back({p.source_at(e.source), p.target_at(e.target)});
      for (const auto& a : tree.basic_arcs()) arcs.push_back({a.source, a.target});
      const Neighborhood nb = Neighborhood().with_arcs(arcs);
      solve_restricted(tree, nb);
      CHECK(tree.objective() == optimum);
    }
  }
}

TEST_CASE("warm basis must lie in the neighbourhood") {
  const Instance inst = testing::random_instance(4, 10, 3);
  const TransportProblem p(inst);
  BasisTree tree = init_row_minimum(p);
  const auto arcs = tree.basic_arcs();
  const std::array<Arc, 2> two{Arc{arcs[0].source, arcs[0].target}, Arc{p.num_sources() - 1, 0}};
  CHECK_THROWS_AS(solve_restricted(tree, Neighborhood().with_arcs(two)), InvariantError);
  CHECK_THROWS_AS(solve_restricted(tree, Neighborhood()), InvalidArgument);
}

TEST_CASE("identical measures stop at once") {
  const GridMeasure g(8, std::vector<std::int64_t>(64, 3));
  const ShieldingSolution s = solve_shielded(Instance(g, g));
  CHECK(s.stats.objective == 0);
  CHECK(s.iterations.size() >= 1);
  CHECK(s.iterations.size() <= 2);
}

TEST_CASE("random instances against the oracle") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const Instance inst = testing::random_instance(2 + static_cast<int>(seed % 7), 30, seed, seed % 4 == 0 ? 0.5 : 0.0);
    const TransportProblem p(inst);
    const ShieldingSolution s = solve_shielded(p);
    CHECK(s.stats.objective == oracle_solve(inst));
    CHECK(s.certificate_fallbacks == 0);
    CHECK(dual_feasible(p, s.u, s.v));
    CHECK(check_feasible(s.plan, inst).feasible);
  }
}

TEST_CASE("agrees with the dense solver on GRFmoderate 32 x 32") {
  ClassSpec spec;
  spec.class_id = 3;
  spec.resolution = 32;
  const auto members = build_class(spec);
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      const TransportProblem p(Instance(members[a], members[b]));
      const ShieldingSolution s = solve_shielded(p);
      CHECK(s.stats.objective == solve_dense(p).stats.objective);
      CHECK(s.certificate_fallbacks == 0);
      REQUIRE_FALSE(s.iterations.empty());
      for (std::size_t k = 1; k < s.iterations.size(); ++k) {
        CHECK(s.iterations[k].objective <= s.iterations[k - 1].objective);
      }
      CHECK(s.iterations.back().objective == s.stats.objective);
      CHECK(dual_feasible(p, s.u, s.v));
    }
  }
}
