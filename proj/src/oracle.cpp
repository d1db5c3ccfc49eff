#include "dotmark/oracle.hpp"

#include <limits>
#include <vector>

#include "dotmark/errors.hpp"

namespace dotmark {

bool oracle_accepts(const Instance& instance) noexcept {
  return instance.resolution() <= 8 ||
         instance.source().positive_count() + instance.target().positive_count() <= kOracleMaxPositivePixels;
}

std::int64_t oracle_solve(const Instance& instance) {
  if (!oracle_accepts(instance)) throw InvalidArgument("oracle_solve: instance exceeds the size guard");
  if (instance.cost().exponent != 2.0) throw InvalidArgument("oracle_solve: only p = 2 is supported");

  const int n = instance.resolution();
  struct Site {
    std::int64_t row, col, mass;
  };
  std::vector<Site> sources, targets;
  for (int k = 0; k < n * n; ++k) {
    if (instance.source()[k] > 0) sources.push_back({k / n, k % n, instance.source()[k]});
    if (instance.target()[k] > 0) targets.push_back({k / n, k % n, instance.target()[k]});
  }
  const std::size_t ns = sources.size(), nt = targets.size();
  std::vector<std::int64_t> c(ns * nt);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::int64_t dr = sources[i].row - targets[j].row;
      const std::int64_t dc = sources[i].col - targets[j].col;
      c[i * nt + j] = dr * dr + dc * dc;
    }
  }

  std::vector<std::int64_t> flow(ns * nt, 0);
  std::vector<std::int64_t> excess(ns), deficit(nt);
  for (std::size_t i = 0; i < ns; ++i) excess[i] = sources[i].mass;
  for (std::size_t j = 0; j < nt; ++j) deficit[j] = targets[j].mass;

  // Node k < ns is a source, k >= ns a target. Potentials keep reduced costs
  // non-negative on the residual graph so Dijkstra stays valid.
  const std::size_t nodes = ns + nt;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> potential(nodes, 0), dist(nodes);
  std::vector<std::int64_t> pred(nodes);
  std::vector<char> done(nodes);
  std::int64_t remaining = instance.source().total();

  while (remaining > 0) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < ns; ++i) {
      if (excess[i] > 0) dist[i] = 0;
    }
    while (true) {
      std::size_t x = nodes;
      for (std::size_t k = 0; k < nodes; ++k) {
        if (!done[k] && dist[k] < kInf && (x == nodes || dist[k] < dist[x])) x = k;
      }
      if (x == nodes) break;
      done[x] = 1;
      if (x < ns) {
        for (std::size_t j = 0; j < nt; ++j) {
          const std::size_t y = ns + j;
          const std::int64_t d = dist[x] + c[x * nt + j] + potential[x] - potential[y];
          if (d < dist[y]) {
            dist[y] = d;
            pred[y] = static_cast<std::int64_t>(x);
          }
        }
      } else {
        const std::size_t j = x - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (flow[i * nt + j] == 0) continue;
          const std::int64_t d = dist[x] - c[i * nt + j] + potential[x] - potential[i];
          if (d < dist[i]) {
            dist[i] = d;
            pred[i] = static_cast<std::int64_t>(x);
          }
        }
      }
    }
    std::size_t sink = nodes;
    for (std::size_t j = 0; j < nt; ++j) {
      if (deficit[j] > 0 && dist[ns + j] < kInf && (sink == nodes || dist[ns + j] < dist[sink])) sink = ns + j;
    }
    if (sink == nodes) throw InvariantError("oracle_solve: no augmenting path (unbalanced instance?)");

    std::int64_t bottleneck = deficit[sink - ns];
    std::size_t x = sink;
    while (pred[x] >= 0) {
      const auto p = static_cast<std::size_t>(pred[x]);
      if (x < ns) bottleneck = std::min(bottleneck, flow[x * nt + (p - ns)]);  // backward arc target p -> source x
      x = p;
    }
    bottleneck = std::min(bottleneck, excess[x]);

    x = sink;
    while (pred[x] >= 0) {
      const auto p = static_cast<std::size_t>(pred[x]);
      if (x >= ns) {
        flow[p * nt + (x - ns)] += bottleneck;
      } else {
        flow[x * nt + (p - ns)] -= bottleneck;
      }
      x = p;
    }
    excess[x] -= bottleneck;
    deficit[sink - ns] -= bottleneck;
    remaining -= bottleneck;

    std::int64_t reach = 0;
    for (std::size_t k = 0; k < nodes; ++k) {
      if (dist[k] < kInf) reach = std::max(reach, dist[k]);
    }
    for (std::size_t k = 0; k < nodes; ++k) potential[k] += dist[k] < kInf ? dist[k] : reach;
  }

  __int128 total = 0;
  for (std::size_t k = 0; k < flow.size(); ++k) total += static_cast<__int128>(flow[k]) * c[k];
  return static_cast<std::int64_t>(total);
}

}  // namespace dotmark
