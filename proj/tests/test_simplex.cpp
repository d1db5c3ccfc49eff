#include <limits>
#include <optional>

#include "doctest.h"
#include "dotmark/benchgen.hpp"
#include "dotmark/errors.hpp"
#include "dotmark/oracle.hpp"
#include "dotmark/simplex.hpp"
#include "support.hpp"

using namespace dotmark;

namespace {

// mu = (3, 1) and nu = (1, 3) on the first row of a 2 x 2 grid.
Instance strip_instance() { return Instance(GridMeasure(2, {3, 1, 0, 0}), GridMeasure(2, {1, 3, 0, 0})); }

std::int64_t brute_force_min_reduced_cost(const BasisTree& tree, std::int32_t i) {
  std::int64_t best = 0;
  for (std::int32_t j = 0; j < tree.num_targets(); ++j) best = std::min(best, tree.reduced_cost(i, j));
  return best;
}

}  // namespace

TEST_CASE("row-minimum initialization") {
  SUBCASE("identical measures give the identity") {
    const Instance inst(GridMeasure(3, {1, 2, 3, 4, 5, 6, 7, 8, 9}), GridMeasure(3, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
    const TransportProblem p(inst);
    const BasisTree tree = init_row_minimum(p);
    CHECK(tree.objective() == 0);
    CHECK(check_feasible(tree.to_plan(), inst).feasible);
  }
  SUBCASE("hand trace on a two-pixel strip") {
    const Instance inst = strip_instance();
    const TransportProblem p(inst);
    const BasisTree tree = init_row_minimum(p);
    const TransportPlan plan = tree.to_plan();
    CHECK(tree.objective() == 2);
    CHECK(check_feasible(plan, inst).feasible);
    // (0 -> 0, 1), (1 -> 1, 1), (0 -> 1, 2)
    CHECK(plan.entries.size() == 3);
    CHECK(tree.basic_arcs().size() == 3);
  }
  SUBCASE("generated 8 x 8 instances") {
    for (int c = 1; c <= 8; ++c) {
      ClassSpec spec;
      spec.class_id = c;
      spec.resolution = 8;
      spec.seed = 3;
      const auto members = build_class(spec);
      for (int k = 0; k + 1 < 10; k += 3) {
        const Instance inst(members[k], members[k + 1]);
        const TransportProblem p(inst);
        const BasisTree tree = init_row_minimum(p);
        CHECK(check_feasible(tree.to_plan(), inst).feasible);
        CHECK(tree.basic_arcs().size() == static_cast<std::size_t>(p.num_sources() + p.num_targets() - 1));
        tree.check_invariants();
      }
    }
  }
}

TEST_CASE("duals") {
  SUBCASE("one source, one target") {
    const Instance inst(GridMeasure(2, {5, 0, 0, 0}), GridMeasure(2, {0, 0, 0, 5}));
    const TransportProblem p(inst);
    const BasisTree tree = init_row_minimum(p);
    CHECK(tree.u(0) == 0);
    CHECK(tree.v(0) == 2);
  }
  SUBCASE("a constant cost shift moves the optimum by K times the mass") {
    const Instance inst = testing::random_instance(5, 20, 4);
    TransportProblem p(inst);
    const std::int64_t base = solve_dense(p).stats.objective;
    const BasisTree before = init_row_minimum(p);
    DensePricer pricer_before(p);
    const auto arc_before = pricer_before.find_entering(before);
    p.set_cost_offset(7);
    CHECK(solve_dense(p).stats.objective == base + 7 * p.total_mass());
    const BasisTree after = init_row_minimum(p);
    DensePricer pricer_after(p);
    const auto arc_after = pricer_after.find_entering(after);
    REQUIRE(arc_before.has_value() == arc_after.has_value());
    if (arc_before) CHECK(*arc_before == *arc_after);
  }
}

TEST_CASE("entering arc rule") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::random_instance(5, 20, seed, 0.2);
    const TransportProblem p(inst);
    BasisTree tree = init_row_minimum(p);
    DensePricer pricer(p);
    while (true) {
      const std::int32_t start = pricer.cursor();
      const std::optional<Arc> arc = pricer.find_entering(tree);
      if (!arc) {
        CHECK(count_negative_reduced_costs(p, tree.source_duals(), tree.target_duals()) == 0);
        break;
      }
      // The arc is the minimum of its row, and every row scanned before it has none negative.
      CHECK(tree.reduced_cost(arc->source, arc->target) == brute_force_min_reduced_cost(tree, arc->source));
      for (std::int32_t i = start; i != arc->source; i = (i + 1) % p.num_sources()) {
        CHECK(brute_force_min_reduced_cost(tree, i) == 0);
      }
      const std::int64_t before = tree.objective();
      const PivotResult r = tree.pivot(*arc);
      CHECK(r.reduced_cost < 0);
      CHECK(tree.objective() == before + r.reduced_cost * r.theta);
      if (r.degenerate()) CHECK(tree.objective() == before);
      CHECK(tree.objective() == tree.recompute_objective());
    }
  }
}

TEST_CASE("hand-built crossed basis") {
  // mu = nu = (1, 1) on a strip; the basis ships crosswise at cost 2.
  const Instance inst(GridMeasure(2, {1, 1, 0, 0}), GridMeasure(2, {1, 1, 0, 0}));
  const TransportProblem p(inst);
  const std::vector<BasicArc> arcs{{0, 1, 1}, {1, 0, 1}, {0, 0, 0}};
  BasisTree tree(p, arcs);
  CHECK(tree.objective() == 2);
  CHECK(tree.u(0) == 0);
  CHECK(tree.v(1) == 1);
  CHECK(tree.u(1) == 1);
  CHECK(tree.reduced_cost(1, 1) == -2);
  CHECK(count_negative_reduced_costs(p, tree.source_duals(), tree.target_duals()) == 1);
  DensePricer pricer(p);
  const auto arc = pricer.find_entering(tree);
  REQUIRE(arc.has_value());
  CHECK(*arc == Arc{1, 1});
  CHECK(pricer.find_entering_bland(tree) == std::optional<Arc>(Arc{1, 1}));
  const PivotResult r = tree.pivot(*arc);
  CHECK(r.theta == 1);
  CHECK(r.objective_change == -2);
  CHECK(tree.objective() == 0);
  tree.check_invariants();
  CHECK_FALSE(pricer.find_entering(tree).has_value());
}

TEST_CASE("dense solver") {
  SUBCASE("identical measures") {
    const GridMeasure g(4, std::vector<std::int64_t>(16, 3));
    CHECK(solve_dense(Instance(g, g)).stats.objective == 0);
  }
  SUBCASE("diagonal move on a 2 x 2 grid") {
    const std::int64_t M = 12345;
    const SimplexSolution s = solve_dense(Instance(GridMeasure(2, {M, 0, 0, 0}), GridMeasure(2, {0, 0, 0, M})));
    CHECK(s.stats.objective == 2 * M);
  }
  SUBCASE("random 6 x 6 against the oracle, with the invariants after every pivot") {
    for (std::uint64_t seed = 100; seed < 300; ++seed) {
      const Instance inst = testing::random_instance(6, 20, seed, seed % 3 == 0 ? 0.4 : 0.0);
      const TransportProblem p(inst);
      SimplexOptions options;
      if (seed % 2) options.degenerate_run_limit = 1;  // exercise Bland's rule
      std::int64_t last = std::numeric_limits<std::int64_t>::max();
      bool monotone = true;
      options.on_pivot = [&](const BasisTree& tree, const PivotResult&) {
        tree.check_invariants();
        monotone = monotone && tree.objective() <= last;
        last = tree.objective();
      };
      const SimplexSolution s = solve_dense(p, options);
      CHECK(monotone);
      CHECK(s.stats.optimal);
      CHECK(s.stats.objective == oracle_solve(inst));
      CHECK(check_feasible(s.plan, inst).feasible);
      CHECK(plan_cost_integer(s.plan) == s.stats.objective);
      CHECK(dual_feasible(p, s.u, s.v));
    }
  }
  SUBCASE("pivot cap") {
    SimplexOptions options;
    options.max_pivots = 1;
    CHECK_THROWS_AS(solve_dense(testing::random_instance(6, 20, 9), options), IterationLimit);
  }
}

TEST_CASE("basis tree construction rejects non-trees") {
  const Instance inst = strip_instance();
  const TransportProblem p(inst);
  const std::vector<BasicArc> too_few{{0, 0, 1}, {0, 1, 2}};
  CHECK_THROWS_AS(BasisTree(p, too_few), InvariantError);
  const std::vector<BasicArc> duplicated{{0, 0, 1}, {0, 0, 1}, {1, 1, 1}};
  CHECK_THROWS_AS(BasisTree(p, duplicated), InvariantError);
}

TEST_CASE("tree invariants under many pivots, including degenerate-heavy instances") {
  dotmark::Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 7;
    std::vector<std::int64_t> a(static_cast<std::size_t>(n) * n), b(a.size(), 0);
    for (auto& x : a) x = rng.below(3) == 0 ? 0 : static_cast<std::int64_t>(rng.below(6));
    a[rng.below(a.size())] += 1;
    std::int64_t total = 0;
    for (const auto x : a) total += x;
    for (std::int64_t k = 0; k < total; ++k) ++b[rng.below(b.size())];
    const Instance inst(GridMeasure(n, a), GridMeasure(n, b));
    const TransportProblem p(inst);
    SimplexOptions options;
    if (t % 2) options.degenerate_run_limit = 1;
    options.on_pivot = [](const BasisTree& tree, const PivotResult&) { tree.check_invariants(); };
    CHECK(solve_dense(p, options).stats.objective == oracle_solve(inst));
  }
}

TEST_CASE("oracle") {
  const GridMeasure g(3, {1, 0, 2, 0, 3, 0, 4, 0, 5});
  CHECK(oracle_solve(Instance(g, g)) == 0);
  CHECK(oracle_solve(strip_instance()) == 2);
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const Instance inst = testing::random_instance(5, 50, seed);
    CHECK(oracle_solve(inst) == solve_dense(inst).stats.objective);
  }
  const Instance big = testing::random_instance(12, 5, 1);
  CHECK_FALSE(oracle_accepts(big));
  CHECK_THROWS_AS(oracle_solve(big), InvalidArgument);
}
