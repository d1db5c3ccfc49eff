#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dotmark {

/**
 * @brief Non-negative integer masses on an n x n pixel grid, row-major.
 *
 * Pixel (r, c) has index r * n + c. The row is the first CSV dimension.
 */
class GridMeasure {
 public:
  GridMeasure() = default;
  /// Throws InvalidArgument on size mismatch, negative masses or zero total.
  GridMeasure(int resolution, std::vector<std::int64_t> masses);

  int resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return masses_.size(); }
  std::span<const std::int64_t> masses() const noexcept { return masses_; }
  std::int64_t operator[](std::size_t pixel) const { return masses_[pixel]; }
  std::int64_t at(int row, int col) const { return masses_[static_cast<std::size_t>(row) * resolution_ + col]; }
  std::int64_t total() const noexcept { return total_; }
  std::size_t positive_count() const noexcept;

  friend bool operator==(const GridMeasure&, const GridMeasure&) = default;

 private:
  int resolution_ = 0;
  std::vector<std::int64_t> masses_;
  std::int64_t total_ = 0;
};

enum class CoordinateConvention {
  PixelInteger,  ///< pixel (r, c) sits at (r, c)
  UnitSquare,    ///< pixel (r, c) sits at ((r + 0.5) / n, (c + 0.5) / n)
};

struct CostSpec {
  double exponent = 2.0;
  CoordinateConvention convention = CoordinateConvention::PixelInteger;

  bool is_integer_squared() const noexcept {
    return exponent == 2.0 && convention == CoordinateConvention::PixelInteger;
  }
};

struct PlanEntry {
  std::int32_t source;  // pixel index in the source grid
  std::int32_t target;  // pixel index in the target grid
  std::int64_t mass;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Sparse transference plan. Entries hold strictly positive masses, no duplicate pairs.
struct TransportPlan {
  int source_resolution = 0;
  int target_resolution = 0;
  std::vector<PlanEntry> entries;

  /// Throws InvalidArgument on out-of-range indices, non-positive masses or duplicates.
  void validate() const;
  /// Sort entries by (source, target).
  void canonicalize();
};

/// A balanced transport problem between two grid measures on the same grid.
class Instance {
 public:
  Instance(GridMeasure source, GridMeasure target, CostSpec cost = {});

  const GridMeasure& source() const noexcept { return source_; }
  const GridMeasure& target() const noexcept { return target_; }
  const CostSpec& cost() const noexcept { return cost_; }
  int resolution() const noexcept { return source_.resolution(); }

 private:
  GridMeasure source_;
  GridMeasure target_;
  CostSpec cost_;
};

/// Squared pixel distance between two pixel indices; the integer cost used by the exact solvers.
inline std::int64_t squared_pixel_distance(std::int32_t i, std::int32_t j, int n) noexcept {
  const std::int64_t dr = i / n - j / n;
  const std::int64_t dc = i % n - j % n;
  return dr * dr + dc * dc;
}

/// ||x_i - y_j||^p under the coordinate convention. Throws InvalidArgument on bad indices.
double cost(std::int64_t i, std::int64_t j, const CostSpec& spec, int n);

/**
 * @brief Sum of c_ij * pi_ij over the plan.
 *
 * For p = 2 under PixelInteger the sum is accumulated exactly in 128-bit
 * integers and converted at the end (exact below 2^53). Use
 * plan_cost_integer when the exact integer is needed.
 */
double plan_cost(const TransportPlan& plan, const CostSpec& spec);

/// Exact objective for p = 2, PixelInteger. Throws NumericalError if it does not fit in int64.
std::int64_t plan_cost_integer(const TransportPlan& plan);

/**
 * @brief (optimal_cost / total_mass)^(1/p).
 *
 * optimal_cost must be expressed in the units of spec.convention.
 */
double wasserstein(double optimal_cost, std::int64_t total_mass, const CostSpec& spec);

/// W_2 in unit-square coordinates from an exact PixelInteger objective.
double unit_square_w2(std::int64_t integer_objective, std::int64_t total_mass, int resolution);

struct MarginalViolation {
  enum class Side { Row, Column };
  Side side;
  std::int32_t index;     // pixel index
  std::int64_t expected;  // mu_i or nu_j
  std::int64_t actual;    // plan marginal
  std::int64_t deficit() const noexcept { return expected - actual; }
};

struct FeasibilityReport {
  bool feasible = true;
  bool structurally_valid = true;
  std::string structural_error;
  std::vector<MarginalViolation> violations;
};

/// Exact marginal check. Never throws; problems are reported.
FeasibilityReport check_feasible(const TransportPlan& plan, const Instance& instance);

GridMeasure load_grid_csv(const std::filesystem::path& path);
GridMeasure parse_grid_csv(const std::string& text);
void save_grid_csv(const GridMeasure& measure, const std::filesystem::path& path);
std::string format_grid_csv(const GridMeasure& measure);

}  // namespace dotmark
