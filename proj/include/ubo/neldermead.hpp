#pragma once

#include "ubo/types.hpp"

#include <functional>

namespace ubo {

// Bounded Nelder-Mead maximization on [0,1]^d with an evaluation budget.
// Points are clamped to the box before evaluation. Returns the best point
// seen (including the start).
std::pair<Vector, double> nelder_mead_max(const std::function<double(VecRef)>& fn,
                                          VecRef x0, int max_evals,
                                          double initial_step = 0.05);

}  // namespace ubo
