#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ubo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VecRef = const Eigen::Ref<const Eigen::VectorXd>&;
using MatRef = const Eigen::Ref<const Eigen::MatrixXd>&;
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed from a base seed; streams never collide for
// distinct indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

inline Vector clamp_unit(Vector x) {
  return x.cwiseMax(0.0).cwiseMin(1.0);
}

enum class Provenance { Init, Selected, ReceivedRemote };

// Ordered (query, observation) pairs on the normalized domain [0,1]^d.
// Points are stored column-wise.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(int dim) : dim_(dim), points_(dim, 0), values_(0) {}

  int dim() const { return dim_; }
  Eigen::Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  void add(VecRef x, double y, Provenance tag) {
    if (x.size() != dim_) throw std::invalid_argument("Dataset::add: dimension mismatch");
    const Eigen::Index n = size();
    points_.conservativeResize(dim_, n + 1);
    values_.conservativeResize(n + 1);
    points_.col(n) = x;
    values_(n) = y;
    provenance_.push_back(tag);
  }

  const Matrix& points() const { return points_; }
  const Vector& values() const { return values_; }
  Vector point(Eigen::Index i) const { return points_.col(i); }
  const std::vector<Provenance>& provenance() const { return provenance_; }

 private:
  int dim_ = 0;
  Matrix points_;
  Vector values_;
  std::vector<Provenance> provenance_;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

}  // namespace ubo
