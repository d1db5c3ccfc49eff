#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dotmark/lbfgs.hpp"
#include "dotmark/measures.hpp"

namespace dotmark {

/// Positive-mass pixels of the target image as points of the unit square.
struct SemidiscreteTargets {
  int resolution = 0;
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;
  std::vector<std::int32_t> pixels;  // row-major pixel index
  std::vector<double> nu;            // probabilities, sum 1

  std::size_t size() const noexcept { return nu.size(); }
  double y_row(std::size_t j) const noexcept { return (rows[j] + 0.5) / resolution; }
  double y_col(std::size_t j) const noexcept { return (cols[j] + 0.5) / resolution; }
};

SemidiscreteTargets make_targets(const GridMeasure& target);

/// Power-cell owner of each of the (q n) x (q n) point samples, row-major.
struct CellPartition {
  int resolution = 0;
  int q = 1;
  std::vector<std::int32_t> cell;
};

/**
 * Assigns each sample point (centers of a q x q subdivision of every pixel)
 * to argmin_j of (ds^2 - w_j) + dt^2, ties to the smallest j. Uses the
 * column-minimum kernel; assign_cells_reference is the brute-force version
 * with the same evaluation order and hence the same result.
 */
CellPartition assign_cells(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w,
                           int q);
CellPartition assign_cells_reference(const GridMeasure& source, const SemidiscreteTargets& targets,
                                     std::span<const double> w, int q);

/// Probability mass of each cell when every sample carries mu_i / q^2.
std::vector<double> cell_masses(const GridMeasure& source, const CellPartition& partition, std::size_t num_targets);

struct PhiEvaluation {
  double value = 0.0;
  std::vector<double> gradient;   // mu(Pow_j) - nu_j
  std::vector<double> cell_mass;  // mu(Pow_j)
  double transport_cost = 0.0;    // integral of |x - T(x)|^2 d mu
  /// Cost of the pixel-to-site plan mu(pixel_i and Pow_j), measured from pixel centers.
  double pixel_plan_cost = 0.0;
};

/**
 * @brief Evaluates the AHA functional on probability-normalized measures.
 *
 *   Phi(w) = -( integral of min_j (|x - y_j|^2 - w_j) d mu + sum_j nu_j w_j ),
 *
 * the negated dual objective, so Phi is convex and is minimized. Every power
 * cell is cut out of the unit square by half-plane clipping against nearby
 * sites (searched in square rings until no farther site can reach the cell)
 * and the pixel-constant density is integrated over it in closed form, so
 * Phi is continuously differentiable and its gradient is exact.
 */
class PowerIntegrator {
 public:
  PowerIntegrator(const GridMeasure& source, const SemidiscreteTargets& targets);

  PhiEvaluation evaluate(std::span<const double> w) const;
  double value(std::span<const double> w, std::span<double> gradient) const;

  std::size_t num_targets() const noexcept { return targets_->size(); }

 private:
  const SemidiscreteTargets* targets_;
  int ns_;  // source resolution
  int nt_;  // target resolution
  std::vector<double> density_;          // mass per unit area, probability-normalized
  std::vector<std::int32_t> target_at_;  // target pixel -> index, -1 if none
  // Quadtree over the target grid. Sites are stored in tree order, so every
  // node owns a contiguous range of order_.
  static constexpr int kLeaf = 2;
  static constexpr int kNearRing = 1;
  struct Node {
    std::int32_t first = 0, last = 0;
    std::int32_t child[4] = {-1, -1, -1, -1};
    double s_lo = 0, s_hi = 0, t_lo = 0, t_hi = 0;  // site bounding box
  };
  struct NodeBound {
    double cs = 0, ct = 0;  // box center
    double gs = 0, gt = 0;  // half the fitted weight slope
    double residual = 0;
  };
  std::int32_t build_node(std::vector<std::int32_t>& sites, int r0, int c0, int size);
  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
};

double phi_value(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w);
std::vector<double> phi_gradient(const GridMeasure& source, const SemidiscreteTargets& targets,
                                 std::span<const double> w);

/// Transport cost of the power map for w estimated by q x q midpoint quadrature.
double quadrature_cost(const GridMeasure& source, const SemidiscreteTargets& targets, std::span<const double> w, int q);

struct AhaConfig {
  double tol = 1e-6;  // gradient sup norm
  int q = 4;          // sampling factor of the reported quadrature cost
  int max_iterations = 20000;
  int memory = 10;
};

struct AhaResult {
  std::vector<double> weights;
  std::vector<double> nu;
  std::vector<double> cell_mass;  // mu(Pow_j), the second marginal of the AHA plan
  double phi = 0.0;
  double cost = 0.0;             // semidiscrete transport cost on the unit square
  double quadrature_cost = 0.0;  // the same at q x q midpoint samples
  double plan_cost = 0.0;        // pixel-to-site plan from pixel centers
  double precision_error = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double seconds = 0.0;
  LbfgsStatus status = LbfgsStatus::IterationLimit;

  /// sqrt(plan_cost): W2 of the plan that AHA returns on the pixel grid, used for RWE.
  double w2() const;
  /// sqrt(cost): the continuous semidiscrete value.
  double semidiscrete_w2() const;
};

/// Minimizes Phi from w = 0 with L-BFGS.
AhaResult minimize_phi(const GridMeasure& source, const SemidiscreteTargets& targets, const AhaConfig& config = {});
AhaResult solve_aha(const Instance& instance, const AhaConfig& config = {});

/// Half the L1 distance between nu and the transported cell masses.
double precision_error(const AhaResult& result);
/// (w2() - exact_w2) / exact_w2. When exact_w2 is 0: 0 if w2() is at rounding level (1e-7), else +inf.
double relative_wasserstein_error(const AhaResult& result, double exact_w2);
double relative_wasserstein_error(double aha_w2, double exact_w2);

}  // namespace dotmark
