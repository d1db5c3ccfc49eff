#include "dotmark/semidiscrete.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "dotmark/errors.hpp"
#include "dotmark/kernels.hpp"

namespace dotmark {

SemidiscreteTargets make_targets(const GridMeasure& target) {
  if (target.total() <= 0) throw InvalidArgument("make_targets: no positive-mass target");
  SemidiscreteTargets t;
  const int n = target.resolution();
  t.resolution = n;
  const double total = static_cast<double>(target.total());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::int64_t m = target.at(r, c);
      if (m <= 0) continue;
      t.rows.push_back(r);
      t.cols.push_back(c);
      t.pixels.push_back(r * n + c);
      t.nu.push_back(static_cast<double>(m) / total);
    }
  }
  return t;
}

namespace {

void check_inputs(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w, int q) {
  if (q < 1) throw InvalidArgument("q must be at least 1");
  if (targets.size() == 0) throw InvalidArgument("no positive-mass target");
  if (source.total() <= 0) throw InvalidArgument("source has no mass");
  if (w.size() != targets.size()) throw InvalidArgument("weight vector length does not match the targets");
}

}  // namespace

namespace {

double sample_value(double ds, double dt, double w) { return (ds * ds - w) + dt * dt; }

}  // namespace

CellPartition assign_cells_reference(const GridMeasure& source, const SemidiscreteTargets& targets,
                                     std::span<const double> w, int q) {
  check_inputs(source, targets, w, q);
  CellPartition part;
  part.resolution = source.resolution();
  part.q = q;
  const int side = source.resolution() * q;
  part.cell.assign(static_cast<std::size_t>(side) * side, -1);
  for (int rr = 0; rr < side; ++rr) {
    const double s = (rr + 0.5) / side;
    for (int cc = 0; cc < side; ++cc) {
      const double t = (cc + 0.5) / side;
      double best = std::numeric_limits<double>::infinity();
      std::int32_t owner = 0;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const double value = sample_value(s - targets.y_row(j), t - targets.y_col(j), w[j]);
        if (value < best) {
          best = value;
          owner = static_cast<std::int32_t>(j);
        }
      }
      part.cell[static_cast<std::size_t>(rr) * side + cc] = owner;
    }
  }
  return part;
}

CellPartition assign_cells(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w,
                           int q) {
  check_inputs(source, targets, w, q);
  CellPartition part;
  part.resolution = source.resolution();
  part.q = q;
  const int side = source.resolution() * q;
  part.cell.assign(static_cast<std::size_t>(side) * side, -1);

  const double inf = std::numeric_limits<double>::infinity();
  const int nt = targets.resolution;
  const auto width = static_cast<std::size_t>(nt);
  std::vector<double> grid(width * width, -inf);
  std::vector<std::int32_t> index(width * width, -1);
  std::vector<std::int32_t> rows;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    grid[targets.pixels[j]] = w[j];
    index[targets.pixels[j]] = static_cast<std::int32_t>(j);
    if (rows.empty() || rows.back() != targets.rows[j]) rows.push_back(targets.rows[j]);
  }
  std::vector<double> best(width);
  std::vector<std::int32_t> owner(width);
  std::vector<std::int32_t> live;
  for (int rr = 0; rr < side; ++rr) {
    const double s = (rr + 0.5) / side;
    // Rows ascend and the kernel keeps the first strict minimum, so each
    // column holds its smallest-index best target.
    std::fill(best.begin(), best.end(), inf);
    std::fill(owner.begin(), owner.end(), -1);
    for (const std::int32_t ra : rows) {
      const double ds = s - (ra + 0.5) / nt;
      kernels::column_min_update({ds * ds, ra, std::span<const double>(grid.data() + ra * width, width), best, owner});
    }
    live.clear();
    for (std::size_t c = 0; c < width; ++c) {
      if (owner[c] >= 0) live.push_back(index[owner[c] * width + c]);
    }
    for (int cc = 0; cc < side; ++cc) {
      const double t = (cc + 0.5) / side;
      double value_best = inf;
      std::int32_t winner = -1;
      for (const std::int32_t j : live) {
        const std::size_t c = static_cast<std::size_t>(targets.cols[j]);
        const double dt = t - targets.y_col(j);
        const double value = best[c] + dt * dt;
        if (value < value_best || (value == value_best && j < winner)) {
          value_best = value;
          winner = j;
        }
      }
      part.cell[static_cast<std::size_t>(rr) * side + cc] = winner;
    }
  }
  return part;
}

std::vector<double> cell_masses(const GridMeasure& source, const CellPartition& partition, std::size_t num_targets) {
  const int n = partition.resolution;
  const int q = partition.q;
  if (n != source.resolution()) throw InvalidArgument("cell_masses: partition does not match the source grid");
  std::vector<double> mass(num_targets, 0.0);
  const double scale = 1.0 / (static_cast<double>(source.total()) * q * q);
  const int side = n * q;
  for (int rr = 0; rr < side; ++rr) {
    for (int cc = 0; cc < side; ++cc) {
      const std::int32_t j = partition.cell[static_cast<std::size_t>(rr) * side + cc];
      mass[j] += static_cast<double>(source.at(rr / q, cc / q)) * scale;
    }
  }
  return mass;
}

double quadrature_cost(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w,
                       int q) {
  const CellPartition part = assign_cells(source, targets, w, q);
  const int side = source.resolution() * q;
  const double scale = 1.0 / (static_cast<double>(source.total()) * q * q);
  double cost = 0.0;
  for (int rr = 0; rr < side; ++rr) {
    for (int cc = 0; cc < side; ++cc) {
      const std::int64_t m = source.at(rr / q, cc / q);
      if (m == 0) continue;
      const std::int32_t j = part.cell[static_cast<std::size_t>(rr) * side + cc];
      const double ds = (rr + 0.5) / side - targets.y_row(j);
      const double dt = (cc + 0.5) / side - targets.y_col(j);
      cost += static_cast<double>(m) * scale * (ds * ds + dt * dt);
    }
  }
  return cost;
}

namespace {

// Polygons live in coordinates relative to the site of the cell being built.
struct Point {
  double s;
  double t;
};
using Polygon = std::vector<Point>;

// Keeps the part of a convex polygon where ns * s + nt * t <= c.
void clip(const Polygon& in, double ns, double nt, double c, Polygon& out) {
  out.clear();
  const std::size_t count = in.size();
  if (count == 0) return;
  const Point* p = &in[count - 1];
  double fp = ns * p->s + nt * p->t - c;
  for (std::size_t k = 0; k < count; ++k) {
    const Point& q = in[k];
    const double fq = ns * q.s + nt * q.t - c;
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double u = fp / (fp - fq);
      out.push_back({p->s + u * (q.s - p->s), p->t + u * (q.t - p->t)});
    }
    if (fq <= 0.0) out.push_back(q);
    p = &q;
    fp = fq;
  }
  if (out.size() < 3) out.clear();
}

// As clip, but in place; returns false when no vertex lies outside.
bool clip_in_place(Polygon& poly, double ns, double nt, double c, Polygon& scratch) {
  bool outside = false;
  for (const Point& p : poly) {
    if (ns * p.s + nt * p.t > c) {
      outside = true;
      break;
    }
  }
  if (!outside) return false;
  clip(poly, ns, nt, c, scratch);
  poly.swap(scratch);
  return true;
}

struct Moments {
  double area = 0.0;
  double second = 0.0;  // integral of s^2 + t^2
};

// Green's theorem on a counter-clockwise polygon.
Moments moments(const Polygon& poly) {
  Moments m;
  const std::size_t count = poly.size();
  for (std::size_t k = 0; k < count; ++k) {
    const Point& p = poly[k == 0 ? count - 1 : k - 1];
    const Point& q = poly[k];
    const double cross = p.s * q.t - q.s * p.t;
    m.area += cross;
    m.second += cross * (p.s * p.s + p.s * q.s + q.s * q.s + p.t * p.t + p.t * q.t + q.t * q.t);
  }
  m.area *= 0.5;
  m.second /= 12.0;
  return m;
}

}  // namespace

PowerIntegrator::PowerIntegrator(const GridMeasure& source, const SemidiscreteTargets& targets)
    : targets_(&targets), ns_(source.resolution()), nt_(targets.resolution) {
  check_inputs(source, targets, std::vector<double>(targets.size()), 1);
  const double per_area = static_cast<double>(ns_) * ns_ / static_cast<double>(source.total());
  density_.resize(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) density_[k] = static_cast<double>(source[k]) * per_area;
  target_at_.assign(static_cast<std::size_t>(nt_) * nt_, -1);
  for (std::size_t j = 0; j < targets.size(); ++j) target_at_[targets.pixels[j]] = static_cast<std::int32_t>(j);

  int size = 1;
  while (size < nt_) size *= 2;
  std::vector<std::int32_t> sites(targets.size());
  for (std::size_t j = 0; j < sites.size(); ++j) sites[j] = static_cast<std::int32_t>(j);
  order_.reserve(targets.size());
  build_node(sites, 0, 0, size);
}

std::int32_t PowerIntegrator::build_node(std::vector<std::int32_t>& sites, int r0, int c0, int size) {
  const SemidiscreteTargets& tg = *targets_;
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.first = static_cast<std::int32_t>(order_.size());
  if (size <= kLeaf) {
    order_.insert(order_.end(), sites.begin(), sites.end());
  } else {
    const int half = size / 2;
    std::vector<std::int32_t> quadrant[4];
    for (const std::int32_t k : sites) {
      quadrant[(tg.rows[k] >= r0 + half ? 2 : 0) + (tg.cols[k] >= c0 + half ? 1 : 0)].push_back(k);
    }
    sites.clear();
    sites.shrink_to_fit();
    for (int q = 0; q < 4; ++q) {
      if (quadrant[q].empty()) continue;
      node.child[q] = build_node(quadrant[q], r0 + (q / 2) * half, c0 + (q % 2) * half, half);
    }
  }
  node.last = static_cast<std::int32_t>(order_.size());
  node.s_lo = node.t_lo = std::numeric_limits<double>::infinity();
  node.s_hi = node.t_hi = -std::numeric_limits<double>::infinity();
  for (std::int32_t e = node.first; e < node.last; ++e) {
    const std::int32_t k = order_[e];
    node.s_lo = std::min(node.s_lo, tg.y_row(k));
    node.s_hi = std::max(node.s_hi, tg.y_row(k));
    node.t_lo = std::min(node.t_lo, tg.y_col(k));
    node.t_hi = std::max(node.t_hi, tg.y_col(k));
  }
  nodes_[index] = node;
  return index;
}

PhiEvaluation PowerIntegrator::evaluate(std::span<const double> w) const {
  const SemidiscreteTargets& tg = *targets_;
  const std::size_t count = tg.size();
  if (w.size() != count) throw InvalidArgument("weight vector length does not match the targets");
  PhiEvaluation e;
  e.cell_mass.assign(count, 0.0);
  e.gradient.resize(count);
  const double pitch = 1.0 / nt_;
  const double pixel = 1.0 / ns_;

  // Per node: a least-squares trend w_k ~ alpha + 2 <y_k - c, g> and the
  // largest residual max_k (w_k - 2 <y_k - c, g>).
  std::vector<NodeBound> bound(nodes_.size());
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Node& node = nodes_[n];
    NodeBound& nb = bound[n];
    nb.cs = 0.5 * (node.s_lo + node.s_hi);
    nb.ct = 0.5 * (node.t_lo + node.t_hi);
    double mean_w = 0.0, mean_s = 0.0, mean_t = 0.0;
    for (std::int32_t e = node.first; e < node.last; ++e) {
      const std::int32_t k = order_[e];
      mean_w += w[k];
      mean_s += tg.y_row(k) - nb.cs;
      mean_t += tg.y_col(k) - nb.ct;
    }
    const double inv = 1.0 / (node.last - node.first);
    mean_w *= inv;
    mean_s *= inv;
    mean_t *= inv;
    double sss = 0.0, stt = 0.0, sst = 0.0, sws = 0.0, swt = 0.0;
    for (std::int32_t e = node.first; e < node.last; ++e) {
      const std::int32_t k = order_[e];
      const double ds = tg.y_row(k) - nb.cs - mean_s;
      const double dt = tg.y_col(k) - nb.ct - mean_t;
      const double dw = w[k] - mean_w;
      sss += ds * ds;
      stt += dt * dt;
      sst += ds * dt;
      sws += dw * ds;
      swt += dw * dt;
    }
    const double det = sss * stt - sst * sst;
    if (det > 1e-12 * pitch * pitch * pitch * pitch) {
      nb.gs = 0.5 * (stt * sws - sst * swt) / det;
      nb.gt = 0.5 * (sss * swt - sst * sws) / det;
    }
    nb.residual = -std::numeric_limits<double>::infinity();
    for (std::int32_t e = node.first; e < node.last; ++e) {
      const std::int32_t k = order_[e];
      const double lin = 2.0 * ((tg.y_row(k) - nb.cs) * nb.gs + (tg.y_col(k) - nb.ct) * nb.gt);
      nb.residual = std::max(nb.residual, w[k] - lin);
    }
  }

  Polygon cell, scratch, strip, rest, piece;
  // Keeps the part of cell j where site j beats site k.
  double box_s_lo = 0.0, box_s_hi = 0.0, box_t_lo = 0.0, box_t_hi = 0.0;  // of the cell
  const auto update_box = [&] {
    if (cell.empty()) return;
    box_s_lo = box_s_hi = cell[0].s;
    box_t_lo = box_t_hi = cell[0].t;
    for (const Point& p : cell) {
      box_s_lo = std::min(box_s_lo, p.s);
      box_s_hi = std::max(box_s_hi, p.s);
      box_t_lo = std::min(box_t_lo, p.t);
      box_t_hi = std::max(box_t_hi, p.t);
    }
  };
  const auto clip_by = [&](std::size_t j, std::int32_t k) {
    const double ds = (tg.rows[k] - tg.rows[j]) * pitch;
    const double dt = (tg.cols[k] - tg.cols[j]) * pitch;
    if (clip_in_place(cell, 2.0 * ds, 2.0 * dt, ds * ds + dt * dt + w[j] - w[k], scratch)) update_box();
  };
  // For x in the cell and k in the block,
  //   w_k - |x - y_k|^2 <= w_j - |x - y_j|^2
  // follows from the trend bound once
  //   w_j - residual - 2 <y_j - c, g> - |x - y_j + g|^2 + dist^2(x + g, box) >= 0,
  // which is checked with the cell's worst vertex and its bounding box.
  const auto node_excludes = [&](std::size_t n, std::size_t j) {
    const Node& node = nodes_[n];
    const NodeBound& bb = bound[n];
    const double a = tg.y_row(j);
    const double b = tg.y_col(j);
    const double shift_s = a + bb.gs;
    const double shift_t = b + bb.gt;
    const double gap_s = std::max({0.0, node.s_lo - (box_s_hi + shift_s), (box_s_lo + shift_s) - node.s_hi});
    const double gap_t = std::max({0.0, node.t_lo - (box_t_hi + shift_t), (box_t_lo + shift_t) - node.t_hi});
    const double trend = 2.0 * ((a - bb.cs) * bb.gs + (b - bb.ct) * bb.gt);
    const double slack = w[j] - bb.residual - trend + gap_s * gap_s + gap_t * gap_t;
    // The farthest vertex from -g; the box corner bound is tried first.
    const double fs = std::max(std::abs(box_s_lo + bb.gs), std::abs(box_s_hi + bb.gs));
    const double ft = std::max(std::abs(box_t_lo + bb.gt), std::abs(box_t_hi + bb.gt));
    if (slack >= fs * fs + ft * ft) return true;
    for (const Point& p : cell) {
      const double ps = p.s + bb.gs;
      const double pt = p.t + bb.gt;
      if (ps * ps + pt * pt > slack) return false;
    }
    return true;
  };
  std::vector<std::int32_t> stack;
  std::pair<double, std::int32_t> children[4];
  double integral = 0.0;  // of min_j (|x - y_j|^2 - w_j) d mu
  double transport = 0.0;
  double pixel_plan = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double a = tg.y_row(j);
    const double b = tg.y_col(j);
    cell = {{-a, -b}, {1.0 - a, -b}, {1.0 - a, 1.0 - b}, {-a, 1.0 - b}};
    update_box();
    const int rj = tg.rows[j];
    const int cj = tg.cols[j];

    // Nearby sites first: they usually fix the cell.
    for (int dr = -kNearRing; dr <= kNearRing && !cell.empty(); ++dr) {
      const int r = rj + dr;
      if (r < 0 || r >= nt_) continue;
      for (int dc = -kNearRing; dc <= kNearRing; ++dc) {
        const int c = cj + dc;
        if (c < 0 || c >= nt_ || (dr == 0 && dc == 0)) continue;
        const std::int32_t k = target_at_[static_cast<std::size_t>(r) * nt_ + c];
        if (k < 0) continue;
        clip_by(j, k);
        if (cell.empty()) break;
      }
    }
    // Then descend the quadtree, nearest child first, skipping any node whose
    // trend bound shows that none of its sites beats j anywhere in the cell.
    stack.assign(1, 0);
    while (!stack.empty() && !cell.empty()) {
      const std::int32_t n = stack.back();
      stack.pop_back();
      if (node_excludes(n, j)) continue;
      const Node& node = nodes_[n];
      int kids = 0;
      for (const std::int32_t c : node.child) {
        if (c < 0) continue;
        const Node& child = nodes_[c];
        const double gs = std::max({0.0, child.s_lo - a, a - child.s_hi});
        const double gt = std::max({0.0, child.t_lo - b, b - child.t_hi});
        children[kids++] = {gs * gs + gt * gt, c};
      }
      if (kids > 0) {
        std::sort(children, children + kids, std::greater<>());
        for (int c = 0; c < kids; ++c) stack.push_back(children[c].second);
        continue;
      }
      for (std::int32_t e = node.first; e < node.last; ++e) {
        const std::int32_t k = order_[e];
        if (std::abs(tg.rows[k] - rj) <= kNearRing && std::abs(tg.cols[k] - cj) <= kNearRing) continue;
        clip_by(j, k);
        if (cell.empty()) break;
      }
    }
    if (cell.empty()) continue;

    // Integrate the pixel-constant density: cut into pixel rows, then columns.
    double s_lo = cell[0].s, s_hi = cell[0].s, t_lo = cell[0].t, t_hi = cell[0].t;
    for (const Point& p : cell) {
      s_lo = std::min(s_lo, p.s);
      s_hi = std::max(s_hi, p.s);
      t_lo = std::min(t_lo, p.t);
      t_hi = std::max(t_hi, p.t);
    }
    const int r0 = std::max(0, static_cast<int>(std::floor((s_lo + a) * ns_)));
    const int r1 = std::min(ns_ - 1, static_cast<int>(std::floor((s_hi + a) * ns_)));
    const int c0 = std::max(0, static_cast<int>(std::floor((t_lo + b) * ns_)));
    const int c1 = std::min(ns_ - 1, static_cast<int>(std::floor((t_hi + b) * ns_)));
    double mass = 0.0;
    double second = 0.0;
    double centered = 0.0;
    rest = cell;
    for (int r = r0; r <= r1 && !rest.empty(); ++r) {
      const double cut = (r + 1) * pixel - a;
      if (r < r1) {
        clip(rest, 1.0, 0.0, cut, strip);
        clip(rest, -1.0, 0.0, -cut, scratch);
        rest.swap(scratch);
      } else {
        strip.swap(rest);
        rest.clear();
      }
      const double* row_density = density_.data() + static_cast<std::size_t>(r) * ns_;
      for (int c = c0; c <= c1 && !strip.empty(); ++c) {
        const double cut_t = (c + 1) * pixel - b;
        if (c < c1) {
          clip(strip, 0.0, 1.0, cut_t, piece);
          clip(strip, 0.0, -1.0, -cut_t, scratch);
          strip.swap(scratch);
        } else {
          piece.swap(strip);
          strip.clear();
        }
        const double rho = row_density[c];
        if (rho == 0.0 || piece.empty()) continue;
        const Moments m = moments(piece);
        const double ds = (r + 0.5) * pixel - a;
        const double dt = (c + 0.5) * pixel - b;
        mass += rho * m.area;
        second += rho * m.second;
        centered += rho * m.area * (ds * ds + dt * dt);
      }
    }
    e.cell_mass[j] = mass;
    transport += second;
    pixel_plan += centered;
    integral += second - w[j] * mass;
  }

  double dual = integral;
  for (std::size_t j = 0; j < count; ++j) {
    dual += tg.nu[j] * w[j];
    e.gradient[j] = e.cell_mass[j] - tg.nu[j];
  }
  e.value = -dual;
  e.transport_cost = transport;
  e.pixel_plan_cost = pixel_plan;
  if (!std::isfinite(e.value)) throw NumericalError("Phi is not finite");
  return e;
}

double PowerIntegrator::value(std::span<const double> w, std::span<double> gradient) const {
  PhiEvaluation e = evaluate(w);
  std::copy(e.gradient.begin(), e.gradient.end(), gradient.begin());
  return e.value;
}

double phi_value(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w) {
  check_inputs(source, targets, w, 1);
  return PowerIntegrator(source, targets).evaluate(w).value;
}

std::vector<double> phi_gradient(const GridMeasure& source, const SemidiscreteTargets& targets,
                                 std::span<const double> w) {
  check_inputs(source, targets, w, 1);
  return PowerIntegrator(source, targets).evaluate(w).gradient;
}

double AhaResult::w2() const { return std::sqrt(std::max(plan_cost, 0.0)); }
double AhaResult::semidiscrete_w2() const { return std::sqrt(std::max(cost, 0.0)); }

AhaResult minimize_phi(const GridMeasure& source, const SemidiscreteTargets& targets, const AhaConfig& config) {
  if (!(config.tol >= 0.0) || config.max_iterations < 0 || config.memory < 1 || config.q < 1) {
    throw InvalidArgument("minimize_phi: invalid configuration");
  }
  const auto start = std::chrono::steady_clock::now();
  const PowerIntegrator integrator(source, targets);
  LbfgsOptions options;
  options.memory = config.memory;
  options.max_iterations = config.max_iterations;
  options.gradient_tol = config.tol;
  const LbfgsResult run = minimize_lbfgs(
      [&](std::span<const double> w, std::span<double> g) { return integrator.value(w, g); },
      std::vector<double>(targets.size(), 0.0), options);

  AhaResult result;
  const PhiEvaluation final_eval = integrator.evaluate(run.x);
  result.weights = run.x;
  result.nu = targets.nu;
  result.cell_mass = final_eval.cell_mass;
  result.phi = final_eval.value;
  result.cost = final_eval.transport_cost;
  result.plan_cost = final_eval.pixel_plan_cost;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.quadrature_cost = quadrature_cost(source, targets, run.x, config.q);
  result.gradient_norm = run.gradient_norm;
  result.iterations = run.iterations;
  result.evaluations = run.evaluations + 1;
  result.status = run.status;
  result.precision_error = precision_error(result);
  return result;
}

AhaResult solve_aha(const Instance& instance, const AhaConfig& config) {
  const SemidiscreteTargets targets = make_targets(instance.target());
  return minimize_phi(instance.source(), targets, config);
}

double precision_error(const AhaResult& result) {
  if (result.nu.size() != result.cell_mass.size()) throw InvalidArgument("precision_error: size mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < result.nu.size(); ++j) sum += std::abs(result.nu[j] - result.cell_mass[j]);
  return 0.5 * sum;
}

double relative_wasserstein_error(double aha_w2, double exact_w2) {
  if (!(exact_w2 >= 0.0) || !(aha_w2 >= 0.0)) throw InvalidArgument("relative_wasserstein_error: W2 must be non-negative");
  // Cell boundaries that coincide with pixel edges leave rounding-level slivers.
  constexpr double kRoundingW2 = 1e-7;
  if (exact_w2 == 0.0) return aha_w2 <= kRoundingW2 ? 0.0 : std::numeric_limits<double>::infinity();
  return (aha_w2 - exact_w2) / exact_w2;
}

double relative_wasserstein_error(const AhaResult& result, double exact_w2) {
  return relative_wasserstein_error(result.w2(), exact_w2);
}

}  // namespace dotmark
