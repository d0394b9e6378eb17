#pragma once

#include "ubo/types.hpp"

#include <functional>

namespace ubo {

// Univariate slice sampling with step-out, applied coordinate-wise.
// One returned sample corresponds to one full sweep through the coordinates.
std::vector<Vector> slice_sample(const std::function<double(const Vector&)>& log_target,
                                 const Vector& x0, int n_samples, int burn_in, Rng& rng,
                                 double width = 1.0, int max_step_out = 10);

}  // namespace ubo
