// Compiled with -mavx512f; only reached when the dispatcher has confirmed AVX-512F support.

#include <immintrin.h>

#include <limits>

#include "dotmark/kernels.hpp"

namespace dotmark::kernels {

RowMin row_min_reduced_cost_avx512(const RowScan& scan) noexcept {
  const std::size_t count = scan.v.size();
  const std::size_t blocked = count & ~std::size_t{7};

  const __m512i source_row = _mm512_set1_epi64(scan.source_row);
  const __m512i source_col = _mm512_set1_epi64(scan.source_col);
  const __m512i u = _mm512_set1_epi64(scan.u);
  const __m512i step = _mm512_set1_epi64(8);
  __m512i lane_index = _mm512_setr_epi64(0, 1, 2, 3, 4, 5, 6, 7);
  __m512i best_value = _mm512_set1_epi64(std::numeric_limits<std::int64_t>::max());
  __m512i best_index = _mm512_set1_epi64(-1);

  for (std::size_t j = 0; j < blocked; j += 8) {
    const __m512i tr = _mm512_cvtepi32_epi64(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(scan.target_row.data() + j)));
    const __m512i tc = _mm512_cvtepi32_epi64(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(scan.target_col.data() + j)));
    const __m512i dr = _mm512_sub_epi64(tr, source_row);
    const __m512i dc = _mm512_sub_epi64(tc, source_col);
    const __m512i cost = _mm512_add_epi64(_mm512_mul_epi32(dr, dr), _mm512_mul_epi32(dc, dc));
    const __m512i v = _mm512_loadu_si512(scan.v.data() + j);
    const __m512i reduced = _mm512_sub_epi64(cost, _mm512_add_epi64(u, v));
    const __mmask8 better = _mm512_cmpgt_epi64_mask(best_value, reduced);
    best_value = _mm512_mask_mov_epi64(best_value, better, reduced);
    best_index = _mm512_mask_mov_epi64(best_index, better, lane_index);
    lane_index = _mm512_add_epi64(lane_index, step);
  }

  alignas(64) std::int64_t values[8];
  alignas(64) std::int64_t indices[8];
  _mm512_store_si512(values, best_value);
  _mm512_store_si512(indices, best_index);

  RowMin best{std::numeric_limits<std::int64_t>::max(), -1};
  for (int lane = 0; lane < 8; ++lane) {
    if (indices[lane] < 0) continue;
    if (values[lane] < best.value || (values[lane] == best.value && indices[lane] < best.index)) {
      best.value = values[lane];
      best.index = static_cast<std::int32_t>(indices[lane]);
    }
  }
  for (std::size_t j = blocked; j < count; ++j) {
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

}  // namespace dotmark::kernels
