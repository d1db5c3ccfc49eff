#pragma once

#include <cstdint>
#include <vector>

#include "dotmark/measures.hpp"

namespace dotmark {

struct Arc {
  std::int32_t source;
  std::int32_t target;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/**
 * @brief Balanced grid transport problem with zero-mass pixels removed.
 *
 * Sources and targets are numbered densely over the positive-mass pixels, in
 * pixel order. Costs are squared pixel distances (p = 2, PixelInteger), which
 * is what all exact solvers work with. Removing zero-mass nodes does not
 * change the optimum.
 */
class TransportProblem {
 public:
  /// Throws InvalidArgument unless the cost is the squared Euclidean distance.
  explicit TransportProblem(const Instance& instance);

  int resolution() const noexcept { return resolution_; }
  std::int32_t num_sources() const noexcept { return static_cast<std::int32_t>(supply_.size()); }
  std::int32_t num_targets() const noexcept { return static_cast<std::int32_t>(demand_.size()); }
  std::int64_t total_mass() const noexcept { return total_; }

  std::int64_t cost(std::int32_t i, std::int32_t j) const noexcept {
    const std::int64_t dr = src_row_[i] - tgt_row_[j];
    const std::int64_t dc = src_col_[i] - tgt_col_[j];
    return dr * dr + dc * dc + cost_offset_;
  }

  /// Constant added to every cost. Shifts every feasible objective by offset * total mass.
  std::int64_t cost_offset() const noexcept { return cost_offset_; }
  void set_cost_offset(std::int64_t offset) noexcept { cost_offset_ = offset; }

  std::int64_t supply(std::int32_t i) const noexcept { return supply_[i]; }
  std::int64_t demand(std::int32_t j) const noexcept { return demand_[j]; }
  const std::vector<std::int64_t>& supplies() const noexcept { return supply_; }
  const std::vector<std::int64_t>& demands() const noexcept { return demand_; }

  std::int32_t source_row(std::int32_t i) const noexcept { return src_row_[i]; }
  std::int32_t source_col(std::int32_t i) const noexcept { return src_col_[i]; }
  std::int32_t target_row(std::int32_t j) const noexcept { return tgt_row_[j]; }
  std::int32_t target_col(std::int32_t j) const noexcept { return tgt_col_[j]; }
  const std::vector<std::int32_t>& target_rows() const noexcept { return tgt_row_; }
  const std::vector<std::int32_t>& target_cols() const noexcept { return tgt_col_; }

  std::int32_t source_pixel(std::int32_t i) const noexcept { return src_pixel_[i]; }
  std::int32_t target_pixel(std::int32_t j) const noexcept { return tgt_pixel_[j]; }
  /// Dense index of the source at a grid pixel, or -1 if that pixel has no mass.
  std::int32_t source_at(std::int32_t pixel) const noexcept { return source_at_[pixel]; }
  std::int32_t target_at(std::int32_t pixel) const noexcept { return target_at_[pixel]; }

 private:
  int resolution_;
  std::int64_t total_;
  std::int64_t cost_offset_ = 0;
  std::vector<std::int32_t> src_row_, src_col_, tgt_row_, tgt_col_;
  std::vector<std::int32_t> src_pixel_, tgt_pixel_;
  std::vector<std::int32_t> source_at_, target_at_;
  std::vector<std::int64_t> supply_, demand_;
};

}  // namespace dotmark
