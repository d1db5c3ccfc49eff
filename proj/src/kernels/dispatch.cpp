#include <atomic>
#include <cstdlib>
#include <cstring>

#include "dotmark/kernels.hpp"

namespace dotmark::kernels {

namespace {

SimdLevel probe() noexcept {
#if defined(DOTMARK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
#if defined(DOTMARK_HAVE_AVX512)
  if (__builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx2")) return SimdLevel::Avx512;
#endif
  if (__builtin_cpu_supports("avx2")) return SimdLevel::Avx2;
#endif
  return SimdLevel::Scalar;
}

SimdLevel clamp(SimdLevel level) noexcept {
  const SimdLevel best = detected_level();
  return static_cast<int>(level) > static_cast<int>(best) ? best : level;
}

SimdLevel initial_level() noexcept {
  // DOTMARK_SIMD=scalar|avx2 caps the level, e.g. for A/B timing.
  if (const char* env = std::getenv("DOTMARK_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return SimdLevel::Scalar;
    if (std::strcmp(env, "avx2") == 0) return clamp(SimdLevel::Avx2);
  }
  return detected_level();
}

std::atomic<SimdLevel>& current() noexcept {
  static std::atomic<SimdLevel> level{initial_level()};
  return level;
}

}  // namespace

SimdLevel detected_level() noexcept {
  static const SimdLevel level = probe();
  return level;
}

SimdLevel active_level() noexcept { return current().load(std::memory_order_relaxed); }

SimdLevel set_level(SimdLevel level) noexcept {
  level = clamp(level);
  current().store(level, std::memory_order_relaxed);
  return level;
}

std::string_view level_name(SimdLevel level) noexcept {
  switch (level) {
    case SimdLevel::Avx512:
      return "avx512";
    case SimdLevel::Avx2:
      return "avx2";
    case SimdLevel::Scalar:
      break;
  }
  return "scalar";
}

RowMin row_min_reduced_cost(const RowScan& scan) noexcept {
  switch (active_level()) {
#if defined(DOTMARK_HAVE_AVX512)
    case SimdLevel::Avx512:
      return row_min_reduced_cost_avx512(scan);
#endif
#if defined(DOTMARK_HAVE_AVX2)
    case SimdLevel::Avx2:
      return row_min_reduced_cost_avx2(scan);
#endif
    default:
      return row_min_reduced_cost_scalar(scan);
  }
}

void column_min_update(const ColumnMinUpdate& update) noexcept {
#if defined(DOTMARK_HAVE_AVX2)
  // The AVX2 variant also serves the AVX-512 level; this loop is store-bound.
  if (active_level() != SimdLevel::Scalar) return column_min_update_avx2(update);
#endif
  column_min_update_scalar(update);
}

}  // namespace dotmark::kernels
