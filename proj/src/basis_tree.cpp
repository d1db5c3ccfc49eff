#include "dotmark/basis_tree.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dotmark/errors.hpp"

namespace dotmark {

BasisTree::BasisTree(const TransportProblem& problem, std::span<const BasicArc> arcs)
    : problem_(&problem), m_(problem.num_sources()), n_(problem.num_targets()) {
  const std::int32_t nodes = m_ + n_;
  if (m_ == 0 || n_ == 0) throw InvariantError("BasisTree: empty problem");
  if (static_cast<std::int64_t>(arcs.size()) != nodes - 1) {
    throw InvariantError("BasisTree: expected " + std::to_string(nodes - 1) + " basic arcs, got " +
                         std::to_string(arcs.size()));
  }
  parent_.assign(nodes, -1);
  flow_.assign(nodes, 0);
  pot_.assign(nodes, 0);

  // Adjacency in CSR form, then BFS from the root.
  std::vector<std::int32_t> degree(nodes + 1, 0);
  for (const auto& a : arcs) {
    if (a.source < 0 || a.source >= m_ || a.target < 0 || a.target >= n_ || a.flow < 0) {
      throw InvariantError("BasisTree: malformed arc");
    }
    ++degree[a.source + 1];
    ++degree[m_ + a.target + 1];
  }
  for (std::int32_t k = 0; k < nodes; ++k) degree[k + 1] += degree[k];
  std::vector<std::int32_t> fill(degree.begin(), degree.end() - 1);
  std::vector<std::int32_t> neighbor(2 * arcs.size());
  std::vector<std::int64_t> neighbor_flow(2 * arcs.size());
  for (const auto& a : arcs) {
    neighbor[fill[a.source]] = m_ + a.target;
    neighbor_flow[fill[a.source]++] = a.flow;
    neighbor[fill[m_ + a.target]] = a.source;
    neighbor_flow[fill[m_ + a.target]++] = a.flow;
  }
  std::vector<char> seen(nodes, 0);
  std::vector<std::int32_t> queue;
  queue.reserve(nodes);
  queue.push_back(0);
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::int32_t x = queue[head];
    for (std::int32_t k = degree[x]; k < degree[x + 1]; ++k) {
      const std::int32_t y = neighbor[k];
      if (seen[y]) {
        if (y != parent_[x]) throw InvariantError("BasisTree: arcs contain a cycle");
        continue;
      }
      seen[y] = 1;
      flow_[y] = neighbor_flow[k];
      parent_[y] = x;
      queue.push_back(y);
    }
  }
  if (static_cast<std::int32_t>(queue.size()) != nodes) throw InvariantError("BasisTree: arcs do not span all nodes");
  build_thread();
  compute_duals();
  objective_ = recompute_objective();
}

void BasisTree::build_thread() {
  const std::int32_t nodes = m_ + n_;
  std::vector<std::int32_t> first(nodes + 1, 0);
  for (std::int32_t z = 1; z < nodes; ++z) ++first[parent_[z] + 1];
  for (std::int32_t k = 0; k < nodes; ++k) first[k + 1] += first[k];
  std::vector<std::int32_t> fill(first.begin(), first.end() - 1);
  std::vector<std::int32_t> children(std::max(nodes - 1, 0));
  for (std::int32_t z = 1; z < nodes; ++z) children[fill[parent_[z]]++] = z;

  std::vector<std::int32_t> order;
  order.reserve(nodes);
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t z = stack.back();
    stack.pop_back();
    order.push_back(z);
    for (std::int32_t k = first[z + 1] - 1; k >= first[z]; --k) stack.push_back(children[k]);
  }
  thread_.assign(nodes, 0);
  rev_thread_.assign(nodes, 0);
  size_.assign(nodes, 1);
  last_.assign(nodes, 0);
  std::vector<std::int32_t> position(nodes);
  for (std::int32_t k = 0; k < nodes; ++k) {
    const std::int32_t z = order[k];
    const std::int32_t next = order[(k + 1) % nodes];
    thread_[z] = next;
    rev_thread_[next] = z;
    position[z] = k;
  }
  for (std::int32_t k = nodes - 1; k > 0; --k) size_[parent_[order[k]]] += size_[order[k]];
  for (std::int32_t z = 0; z < nodes; ++z) last_[z] = order[position[z] + size_[z] - 1];
}

void BasisTree::compute_duals() {
  pot_[0] = 0;
  for (std::int32_t node = thread_[0]; node != 0; node = thread_[node]) {
    const std::int32_t p = parent_[node];
    if (node >= m_) {
      pot_[node] = problem_->cost(p, node - m_) - pot_[p];
    } else {
      pot_[node] = problem_->cost(node, p - m_) - pot_[p];
    }
  }
}

std::int64_t BasisTree::arc_index(std::int32_t child) const noexcept {
  const std::int32_t p = parent_[child];
  if (child < m_) return static_cast<std::int64_t>(child) * n_ + (p - m_);
  return static_cast<std::int64_t>(p) * n_ + (child - m_);
}

PivotResult BasisTree::pivot(Arc entering, LeavingRule rule) {
  const std::int32_t a = entering.source;
  const std::int32_t b = m_ + entering.target;
  if (is_basic(entering.source, entering.target)) throw InvariantError("pivot: entering arc is already basic");

  PivotResult result;
  result.reduced_cost = reduced_cost(entering.source, entering.target);

  // Climb to the join: a node is never an ancestor of a node with a larger subtree.
  path_source_side_.clear();
  path_target_side_.clear();
  std::int32_t x = a;
  std::int32_t y = b;
  while (x != y) {
    if (size_[x] <= size_[y]) {
      path_source_side_.push_back(x);
      x = parent_[x];
    } else {
      path_target_side_.push_back(y);
      y = parent_[y];
    }
    if (x < 0 || y < 0) throw InvariantError("pivot: cycle not found");
  }

  // Pushing theta along (a, b) lowers the flow on arcs walked target -> source
  // on the way from b back to a: target nodes on b's side, source nodes on a's side.
  // Depth ties are compared by distance below the join, which orders cycle
  // nodes exactly as depth from the root does.
  std::int64_t theta = std::numeric_limits<std::int64_t>::max();
  std::int32_t out = -1;
  std::size_t out_dist = 0;
  bool out_on_target_side = false;
  auto consider = [&](std::int32_t z, std::size_t dist, bool target_side) {
    const std::int64_t f = flow_[z];
    bool take = f < theta;
    if (!take && f == theta) {
      if (rule == LeavingRule::Bland) {
        take = arc_index(z) < arc_index(out);
      } else {
        take = dist < out_dist || (dist == out_dist && arc_index(z) < arc_index(out));
      }
    }
    if (take) {
      theta = f;
      out = z;
      out_dist = dist;
      out_on_target_side = target_side;
    }
  };
  const std::size_t ls = path_source_side_.size();
  const std::size_t lt = path_target_side_.size();
  for (std::size_t t = 0; t < ls; ++t) {
    if (path_source_side_[t] < m_) consider(path_source_side_[t], ls - t, false);
  }
  for (std::size_t t = 0; t < lt; ++t) {
    if (path_target_side_[t] >= m_) consider(path_target_side_[t], lt - t, true);
  }
  if (out < 0) throw InvariantError("pivot: no blocking arc on cycle");

  for (const std::int32_t z : path_source_side_) flow_[z] += z < m_ ? -theta : theta;
  for (const std::int32_t z : path_target_side_) flow_[z] += z >= m_ ? -theta : theta;

  result.theta = theta;
  result.objective_change = result.reduced_cost * theta;
  if (out < m_) {
    result.leaving = {out, parent_[out] - m_};
  } else {
    result.leaving = {parent_[out], out - m_};
  }

  // Re-hang the subtree S cut off by the leaving arc below the entering arc,
  // reversing the path q = side[0], ..., side[k] = out. The new preorder of S
  // is the old subtree of side[0], then for each later path node the part of
  // its old subtree not containing its predecessor on the path.
  const std::vector<std::int32_t>& side = out_on_target_side ? path_target_side_ : path_source_side_;
  const std::vector<std::int32_t>& other = out_on_target_side ? path_source_side_ : path_target_side_;
  const std::int32_t q = out_on_target_side ? b : a;
  const std::int32_t p = out_on_target_side ? a : b;
  const auto k = static_cast<std::size_t>(std::find(side.begin(), side.end(), out) - side.begin());
  const std::int32_t moved = size_[out];
  const std::int32_t old_last = last_[out];
  const std::int32_t old_parent = parent_[out];

  segments_.clear();
  segments_.emplace_back(side[0], last_[side[0]]);
  for (std::size_t t = 1; t <= k; ++t) {
    const std::int32_t v = side[t];
    const std::int32_t w = side[t - 1];
    segments_.emplace_back(v, rev_thread_[w]);
    if (last_[w] != last_[v]) segments_.emplace_back(thread_[last_[w]], last_[v]);
  }
  const std::int32_t new_last = segments_.back().second;

  // Cut S out of the thread.
  const std::int32_t before = rev_thread_[out];
  const std::int32_t after = thread_[old_last];
  thread_[before] = after;
  rev_thread_[after] = before;
  for (std::int32_t u = old_parent; u >= 0 && last_[u] == old_last; u = parent_[u]) last_[u] = before;
  // Sizes change only below the join.
  for (std::size_t t = k + 1; t < side.size(); ++t) size_[side[t]] -= moved;
  for (const std::int32_t z : other) size_[z] += moved;

  // Relink S in its new order and fix the reversed path.
  for (std::size_t s = 0; s + 1 < segments_.size(); ++s) {
    thread_[segments_[s].second] = segments_[s + 1].first;
    rev_thread_[segments_[s + 1].first] = segments_[s].second;
  }
  saved_flow_.resize(k + 1);
  saved_size_.resize(k + 1);
  for (std::size_t t = 0; t <= k; ++t) {
    saved_flow_[t] = flow_[side[t]];
    saved_size_[t] = size_[side[t]];
    last_[side[t]] = new_last;
  }
  parent_[q] = p;
  flow_[q] = theta;
  size_[q] = moved;
  for (std::size_t t = 0; t < k; ++t) {
    parent_[side[t + 1]] = side[t];
    flow_[side[t + 1]] = saved_flow_[t];
    size_[side[t + 1]] = moved - saved_size_[t];
  }

  // Splice S in right after p as its first child.
  const std::int32_t next = thread_[p];
  thread_[p] = q;
  rev_thread_[q] = p;
  thread_[new_last] = next;
  rev_thread_[next] = new_last;
  if (last_[p] == p) {
    for (std::int32_t u = p; u >= 0 && last_[u] == p; u = parent_[u]) last_[u] = new_last;
  }

  // Shift duals in the moved subtree so the entering arc gets zero reduced cost.
  const std::int64_t r = result.reduced_cost;
  const std::int64_t source_shift = q < m_ ? r : -r;
  for (std::int32_t node = q;; node = thread_[node]) {
    pot_[node] += node < m_ ? source_shift : -source_shift;
    if (node == new_last) break;
  }

  objective_ += result.objective_change;
  return result;
}

std::int64_t BasisTree::recompute_objective() const {
  __int128 sum = 0;
  for (std::int32_t z = 1; z < m_ + n_; ++z) {
    const std::int32_t p = parent_[z];
    const std::int64_t c = z < m_ ? problem_->cost(z, p - m_) : problem_->cost(p, z - m_);
    sum += static_cast<__int128>(c) * flow_[z];
  }
  return static_cast<std::int64_t>(sum);
}

std::vector<BasicArc> BasisTree::basic_arcs() const {
  std::vector<BasicArc> arcs;
  arcs.reserve(m_ + n_ - 1);
  for (std::int32_t z = 1; z < m_ + n_; ++z) {
    const std::int32_t p = parent_[z];
    if (z < m_) {
      arcs.push_back({z, p - m_, flow_[z]});
    } else {
      arcs.push_back({p, z - m_, flow_[z]});
    }
  }
  return arcs;
}

TransportPlan BasisTree::to_plan() const {
  TransportPlan plan;
  plan.source_resolution = plan.target_resolution = problem_->resolution();
  for (const auto& a : basic_arcs()) {
    if (a.flow > 0) plan.entries.push_back({problem_->source_pixel(a.source), problem_->target_pixel(a.target), a.flow});
  }
  plan.canonicalize();
  return plan;
}

void BasisTree::check_invariants() const {
  const std::int32_t nodes = m_ + n_;
  if (parent_[0] != -1) throw InvariantError("root has a parent");

  // The thread must be a preorder of the parent links.
  std::vector<std::int32_t> order;
  order.reserve(nodes);
  std::vector<std::int32_t> stack;
  std::int32_t z = 0;
  do {
    if (static_cast<std::int32_t>(order.size()) >= nodes) throw InvariantError("thread revisits nodes");
    if (rev_thread_[thread_[z]] != z) throw InvariantError("reverse thread disagrees");
    if (z != 0) {
      while (!stack.empty() && stack.back() != parent_[z]) stack.pop_back();
      if (stack.empty()) throw InvariantError("thread is not a preorder");
    }
    stack.push_back(z);
    order.push_back(z);
    z = thread_[z];
  } while (z != 0);
  if (static_cast<std::int32_t>(order.size()) != nodes) throw InvariantError("tree does not span all nodes");
  std::vector<std::int32_t> position(nodes), size(nodes, 1);
  for (std::int32_t k = 0; k < nodes; ++k) position[order[k]] = k;
  for (std::int32_t k = nodes - 1; k > 0; --k) size[parent_[order[k]]] += size[order[k]];
  for (std::int32_t x = 0; x < nodes; ++x) {
    if (size[x] != size_[x]) throw InvariantError("stale subtree size");
    if (order[position[x] + size[x] - 1] != last_[x]) throw InvariantError("stale last descendant");
  }

  std::vector<std::int64_t> out_flow(m_, 0), in_flow(n_, 0);
  for (std::int32_t c = 1; c < nodes; ++c) {
    const std::int32_t p = parent_[c];
    if ((c < m_) == (p < m_)) throw InvariantError("non-bipartite basic arc");
    if (flow_[c] < 0) throw InvariantError("negative flow on basic arc");
    const std::int32_t i = c < m_ ? c : p;
    const std::int32_t j = (c < m_ ? p : c) - m_;
    out_flow[i] += flow_[c];
    in_flow[j] += flow_[c];
    if (reduced_cost(i, j) != 0) throw InvariantError("dual equality violated on basic arc");
  }
  if (pot_[0] != 0) throw InvariantError("root dual is not zero");
  for (std::int32_t i = 0; i < m_; ++i) {
    if (out_flow[i] != problem_->supply(i)) throw InvariantError("source marginal violated");
  }
  for (std::int32_t j = 0; j < n_; ++j) {
    if (in_flow[j] != problem_->demand(j)) throw InvariantError("target marginal violated");
  }
  if (objective_ != recompute_objective()) throw InvariantError("incremental objective drifted");
}

}  // namespace dotmark
