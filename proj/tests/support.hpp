#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dotmark/measures.hpp"
#include "dotmark/rng.hpp"

namespace testing {

// Random masses in [0, max_mass] with roughly zero_share of the pixels empty.
inline std::vector<std::int64_t> random_masses(int n, std::int64_t max_mass, dotmark::Rng& rng,
                                               double zero_share = 0.0) {
  std::vector<std::int64_t> m(static_cast<std::size_t>(n) * n);
  for (auto& x : m) x = rng.uniform() < zero_share ? 0 : static_cast<std::int64_t>(rng.below(max_mass + 1));
  const std::size_t p = rng.below(m.size());
  m[p] = std::max<std::int64_t>(1, m[p]);
  return m;
}

// A balanced instance whose masses stay within [0, max_mass]: the target gets
// the source's total one unit at a time on pixels that still have room.
inline dotmark::Instance random_instance(int n, std::int64_t max_mass, std::uint64_t seed, double zero_share = 0.0) {
  dotmark::Rng rng(seed);
  std::vector<std::int64_t> a = random_masses(n, max_mass, rng, zero_share);
  std::int64_t total = 0;
  for (const auto x : a) total += x;
  std::vector<std::int64_t> b(a.size(), 0);
  for (std::int64_t k = 0; k < total; ++k) {
    std::size_t p;
    do {
      p = rng.below(b.size());
    } while (b[p] >= max_mass);
    ++b[p];
  }
  return dotmark::Instance(dotmark::GridMeasure(n, std::move(a)), dotmark::GridMeasure(n, std::move(b)));
}

// Brute-force objective of a plan with plain 64-bit summation.
inline std::int64_t naive_plan_cost(const dotmark::TransportPlan& plan) {
  std::int64_t sum = 0;
  const int n = plan.source_resolution;
  for (const auto& e : plan.entries) {
    const std::int64_t dr = e.source / n - e.target / n;
    const std::int64_t dc = e.source % n - e.target % n;
    sum += (dr * dr + dc * dc) * e.mass;
  }
  return sum;
}

}  // namespace testing
