#include "ubo/sobol.hpp"

#include <bit>
#include <stdexcept>

namespace ubo {

namespace {

struct Poly {
  int s;                   // degree
  std::uint32_t a;         // coefficients (excluding leading/trailing 1)
  std::array<std::uint32_t, 5> m;
};

// new-joe-kuo-6 table, dimensions 2..10.
constexpr Poly kPolys[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
};

}  // namespace

SobolSequence::SobolSequence(int dim, std::uint64_t skip) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("SobolSequence: dimension out of range");
  dirs_.resize(dim);
  state_.assign(dim, 0u);

  // First dimension: van der Corput.
  for (int k = 0; k < kBits; ++k) dirs_[0][k] = 1u << (kBits - 1 - k);

  for (int j = 1; j < dim; ++j) {
    const Poly& p = kPolys[j - 1];
    auto& v = dirs_[j];
    for (int k = 0; k < p.s; ++k) v[k] = p.m[k] << (kBits - 1 - k);
    for (int k = p.s; k < kBits; ++k) {
      v[k] = v[k - p.s] ^ (v[k - p.s] >> p.s);
      for (int i = 1; i < p.s; ++i)
        if ((p.a >> (p.s - 1 - i)) & 1u) v[k] ^= v[k - i];
    }
  }
  this->skip(skip);
}

Vector SobolSequence::next() {
  const int c = std::countr_zero(index_ + 1);  // index of lowest zero bit of index_
  ++index_;
  Vector out(dim_);
  constexpr double scale = 1.0 / 4294967296.0;  // 2^-32
  for (int j = 0; j < dim_; ++j) {
    state_[j] ^= dirs_[j][c];
    out(j) = state_[j] * scale;
  }
  return out;
}

Matrix SobolSequence::block(int n) {
  Matrix out(dim_, n);
  for (int i = 0; i < n; ++i) out.col(i) = next();
  return out;
}

void SobolSequence::skip(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) next();
}

}  // namespace ubo
