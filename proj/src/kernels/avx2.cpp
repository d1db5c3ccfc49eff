// Compiled with -mavx2; only reached when the dispatcher has confirmed AVX2 support.

#include <immintrin.h>

#include <limits>

#include "dotmark/kernels.hpp"

namespace dotmark::kernels {

RowMin row_min_reduced_cost_avx2(const RowScan& scan) noexcept {
  const std::size_t count = scan.v.size();
  const std::size_t blocked = count & ~std::size_t{3};

  const __m256i source_row = _mm256_set1_epi64x(scan.source_row);
  const __m256i source_col = _mm256_set1_epi64x(scan.source_col);
  const __m256i u = _mm256_set1_epi64x(scan.u);
  const __m256i step = _mm256_set1_epi64x(4);
  __m256i lane_index = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i best_value = _mm256_set1_epi64x(std::numeric_limits<std::int64_t>::max());
  __m256i best_index = _mm256_set1_epi64x(-1);

  for (std::size_t j = 0; j < blocked; j += 4) {
    const __m256i tr = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(scan.target_row.data() + j)));
    const __m256i tc = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(scan.target_col.data() + j)));
    const __m256i dr = _mm256_sub_epi64(tr, source_row);
    const __m256i dc = _mm256_sub_epi64(tc, source_col);
    // |dr|, |dc| < 2^31, so the signed 32x32 -> 64 multiply is exact.
    const __m256i cost = _mm256_add_epi64(_mm256_mul_epi32(dr, dr), _mm256_mul_epi32(dc, dc));
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(scan.v.data() + j));
    const __m256i reduced = _mm256_sub_epi64(cost, _mm256_add_epi64(u, v));
    const __m256i better = _mm256_cmpgt_epi64(best_value, reduced);
    best_value = _mm256_blendv_epi8(best_value, reduced, better);
    best_index = _mm256_blendv_epi8(best_index, lane_index, better);
    lane_index = _mm256_add_epi64(lane_index, step);
  }

  alignas(32) std::int64_t values[4];
  alignas(32) std::int64_t indices[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(values), best_value);
  _mm256_store_si256(reinterpret_cast<__m256i*>(indices), best_index);

  RowMin best{std::numeric_limits<std::int64_t>::max(), -1};
  for (int lane = 0; lane < 4; ++lane) {
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

void column_min_update_avx2(const ColumnMinUpdate& update) noexcept {
  const std::size_t count = update.weights.size();
  const std::size_t blocked = count & ~std::size_t{3};
  const __m256d offset = _mm256_set1_pd(update.offset);
  double* best = update.best.data();
  const double* weights = update.weights.data();
  std::int32_t* owner = update.owner.data();

  for (std::size_t c = 0; c < blocked; c += 4) {
    const __m256d value = _mm256_sub_pd(offset, _mm256_loadu_pd(weights + c));
    const __m256d current = _mm256_loadu_pd(best + c);
    const __m256d better = _mm256_cmp_pd(value, current, _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(better);
    if (mask == 0) continue;
    _mm256_storeu_pd(best + c, _mm256_blendv_pd(current, value, better));
    if (mask & 1) owner[c] = update.tag;
    if (mask & 2) owner[c + 1] = update.tag;
    if (mask & 4) owner[c + 2] = update.tag;
    if (mask & 8) owner[c + 3] = update.tag;
  }
  for (std::size_t c = blocked; c < count; ++c) {
    const double value = update.offset - weights[c];
    if (value < best[c]) {
      best[c] = value;
      owner[c] = update.tag;
    }
  }
}

}  // namespace dotmark::kernels
