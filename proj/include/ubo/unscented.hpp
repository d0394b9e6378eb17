#pragma once

#include "ubo/types.hpp"

#include <functional>
#include <utility>

namespace ubo {

// Scaled unscented transform configuration over the input-noise
// distribution N(x, input_cov).
struct UTConfig {
  double alpha = 1.0;   // in (0, 1]
  double kappa = 0.0;   // >= 0
  Matrix input_cov;     // d x d, PSD

  int dim() const { return static_cast<int>(input_cov.rows()); }
  double gamma() const {
    const double d = static_cast<double>(dim());
    return alpha * alpha * (d + kappa) - d;
  }

  static UTConfig isotropic(int dim, double sigma, double alpha = 1.0, double kappa = 0.0) {
    return {alpha, kappa, sigma * sigma * Matrix::Identity(dim, dim)};
  }
};

// 2d+1 sigma points with weights; the center weight may be negative for
// gamma < 0 (valid in the scaled transform).
struct SigmaSet {
  Matrix points;   // d x (2d+1)
  Vector weights;  // sums to 1
};

// Sigma points around xbar, clamped to [0,1]^d after offsetting.
SigmaSet sigma_points(VecRef xbar, const UTConfig& cfg);

// UT estimate of E[fn(x)] with x ~ N(xbar, input_cov).
double ut_expectation(const std::function<double(VecRef)>& fn, VecRef xbar,
                      const UTConfig& cfg);

// Batched variant: expands all columns of X to sigma points, evaluates them
// with one call to fn_block, and recombines with the UT weights.
Vector ut_expectation_block(const std::function<Vector(MatRef)>& fn_block, MatRef X,
                            const UTConfig& cfg);

// Most stable incumbent among observed points: argmax over the dataset of
// the UT-integrated field. Ties broken by earliest index.
std::pair<Vector, double> unscented_incumbent(
    const std::function<Vector(MatRef)>& field_block, const Dataset& data,
    const UTConfig& cfg);

}  // namespace ubo
