#pragma once

#include "ubo/types.hpp"

#include <array>
#include <cstdint>

namespace ubo {

// Gray-code Sobol sequence (Joe-Kuo direction numbers, up to 10 dimensions).
// The first emitted point is (0.5, ..., 0.5); the origin is never produced.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 10;
  static constexpr int kBits = 32;

  explicit SobolSequence(int dim, std::uint64_t skip = 0);

  int dim() const { return dim_; }
  std::uint64_t index() const { return index_; }

  Vector next();
  Matrix block(int n);  // dim x n, consecutive points
  void skip(std::uint64_t n);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, kBits>> dirs_;
  std::vector<std::uint32_t> state_;
};

}  // namespace ubo
