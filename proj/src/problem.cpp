#include "dotmark/problem.hpp"

#include "dotmark/errors.hpp"

namespace dotmark {

TransportProblem::TransportProblem(const Instance& instance)
    : resolution_(instance.resolution()), total_(instance.source().total()) {
  if (instance.cost().exponent != 2.0) {
    throw InvalidArgument("exact solvers need integer costs: only the squared Euclidean cost (p = 2) is supported");
  }
  const int n = resolution_;
  const std::size_t size = static_cast<std::size_t>(n) * n;
  source_at_.assign(size, -1);
  target_at_.assign(size, -1);
  for (std::size_t k = 0; k < size; ++k) {
    const auto pixel = static_cast<std::int32_t>(k);
    if (const auto mass = instance.source()[k]; mass > 0) {
      source_at_[k] = static_cast<std::int32_t>(supply_.size());
      supply_.push_back(mass);
      src_pixel_.push_back(pixel);
      src_row_.push_back(pixel / n);
      src_col_.push_back(pixel % n);
    }
    if (const auto mass = instance.target()[k]; mass > 0) {
      target_at_[k] = static_cast<std::int32_t>(demand_.size());
      demand_.push_back(mass);
      tgt_pixel_.push_back(pixel);
      tgt_row_.push_back(pixel / n);
      tgt_col_.push_back(pixel % n);
    }
  }
}

}  // namespace dotmark
