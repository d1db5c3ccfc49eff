#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, AVX2 (and for the row scan AVX-512) versions; the dispatcher
// picks one at runtime. Both
// variants return bit-identical results (integer arithmetic, or exact
// min/compare on doubles), which tests/test_kernels.cpp checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dotmark::kernels {

enum class SimdLevel { Scalar, Avx2, Avx512 };

/// Best level supported by this CPU and build.
SimdLevel detected_level() noexcept;
/// Level currently used by the dispatching entry points.
SimdLevel active_level() noexcept;
/// Force a level (clamped to what is supported). Returns the level actually set.
SimdLevel set_level(SimdLevel level) noexcept;
std::string_view level_name(SimdLevel level) noexcept;

struct RowMin {
  std::int64_t value;  // least reduced cost in the row
  std::int32_t index;  // first target attaining it (-1 for an empty row)
};

/**
 * @brief Least reduced cost c_ij - u_i - v_j over a whole row of targets.
 *
 * Costs are squared pixel distances computed on the fly from the target
 * coordinates. Ties resolve to the smallest target index.
 */
struct RowScan {
  std::int32_t source_row;
  std::int32_t source_col;
  std::int64_t u;
  std::span<const std::int32_t> target_row;
  std::span<const std::int32_t> target_col;
  std::span<const std::int64_t> v;
};

RowMin row_min_reduced_cost(const RowScan& scan) noexcept;
RowMin row_min_reduced_cost_scalar(const RowScan& scan) noexcept;
#if defined(DOTMARK_HAVE_AVX2)
RowMin row_min_reduced_cost_avx2(const RowScan& scan) noexcept;
#endif
#if defined(DOTMARK_HAVE_AVX512)
RowMin row_min_reduced_cost_avx512(const RowScan& scan) noexcept;
#endif

/**
 * @brief Running column-wise minimum used to build power-diagram envelopes.
 *
 * For every column c: value = offset - weights[c]; if value < best[c] then
 * best[c] = value and owner[c] = tag. Entries with weight -inf never win.
 */
struct ColumnMinUpdate {
  double offset;
  std::int32_t tag;
  std::span<const double> weights;
  std::span<double> best;
  std::span<std::int32_t> owner;
};

void column_min_update(const ColumnMinUpdate& update) noexcept;
void column_min_update_scalar(const ColumnMinUpdate& update) noexcept;
#if defined(DOTMARK_HAVE_AVX2)
void column_min_update_avx2(const ColumnMinUpdate& update) noexcept;
#endif

}  // namespace dotmark::kernels
