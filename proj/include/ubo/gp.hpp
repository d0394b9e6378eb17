#pragma once

#include "ubo/kernels.hpp"
#include "ubo/types.hpp"

namespace ubo {

// Zero-mean GP posterior state. Immutable after fit; observations are
// standardized internally and predictions de-standardized on the way out.
struct GPState {
  Dataset data;
  Kernel kernel;
  double noise_variance = 0.0;
  Matrix chol_lower;   // L with L L^T = K + I sigma_n^2 (+ jitter)
  Vector alpha;        // (K + I sigma_n^2)^-1 y_std
  double y_offset = 0.0;
  double y_scale = 1.0;
  double jitter = 0.0; // diagonal jitter actually applied
};

GPState fit(const Dataset& data, Kernel kernel, double noise_variance);

Prediction predict(const GPState& state, VecRef xq);
// Batched prediction over query columns Q (d x m).
void predict_block(const GPState& state, MatRef Q, Vector& mean, Vector& variance);

// Prior belief before any data: mean 0, variance k(x, x).
Prediction prior_predict(const Kernel& kernel, VecRef xq);

// Log marginal likelihood of the standardized observations.
double log_marginal_likelihood(const GPState& state);

}  // namespace ubo
