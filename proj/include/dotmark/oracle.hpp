#pragma once

#include <cstdint>

#include "dotmark/measures.hpp"

namespace dotmark {

/// Largest instance the oracle accepts: n <= 8, or at most this many positive pixels in total.
inline constexpr std::size_t kOracleMaxPositivePixels = 128;

bool oracle_accepts(const Instance& instance) noexcept;

/**
 * @brief Exact optimal objective by successive shortest paths.
 *
 * Independent verification route: a dense Dijkstra with node potentials on
 * the residual bipartite graph, written without any of the simplex code.
 * Works for p = 2 only and returns the objective in squared pixel units.
 * Throws InvalidArgument if the instance is larger than the guard.
 */
std::int64_t oracle_solve(const Instance& instance);

}  // namespace dotmark
