#include <limits>

#include "dotmark/kernels.hpp"

namespace dotmark::kernels {

RowMin row_min_reduced_cost_scalar(const RowScan& scan) noexcept {
  RowMin best{std::numeric_limits<std::int64_t>::max(), -1};
  const std::size_t count = scan.v.size();
  for (std::size_t j = 0; j < count; ++j) {
    const std::int64_t dr = scan.target_row[j] - scan.source_row;
    const std::int64_t dc = scan.target_col[j] - scan.source_col;
    const std::int64_t reduced = dr * dr + dc * dc - scan.u - scan.v[j];
    if (reduced < best.value) {
      best.value = reduced;
      best.index = static_cast<std::int32_t>(j);
    }
  }
  return best;
}

void column_min_update_scalar(const ColumnMinUpdate& update) noexcept {
  const std::size_t count = update.weights.size();
  for (std::size_t c = 0; c < count; ++c) {
    const double value = update.offset - update.weights[c];
    if (value < update.best[c]) {
      update.best[c] = value;
      update.owner[c] = update.tag;
    }
  }
}

}  // namespace dotmark::kernels
