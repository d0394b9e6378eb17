#include "ubo/slice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ubo {

namespace {

void slice_coordinate(const std::function<double(const Vector&)>& log_target, Vector& x,
                      int coord, double& logf_x, Rng& rng, double width, int max_step_out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  const double x0 = x(coord);
  const double log_slice = logf_x - expo(rng);

  double lo = x0 - width * unit(rng);
  double hi = lo + width;

  auto eval_at = [&](double v) {
    x(coord) = v;
    return log_target(x);
  };

  for (int i = 0; i < max_step_out && eval_at(lo) > log_slice; ++i) lo -= width;
  for (int i = 0; i < max_step_out && eval_at(hi) > log_slice; ++i) hi += width;

  // Shrinkage: a proposal below the slice tightens the interval toward x0.
  for (int tries = 0; tries < 1000; ++tries) {
    const double v = lo + unit(rng) * (hi - lo);
    const double logf_v = eval_at(v);
    if (logf_v > log_slice) {
      logf_x = logf_v;
      return;
    }
    if (v < x0)
      lo = v;
    else
      hi = v;
  }
  // Interval collapsed onto the current point.
  x(coord) = x0;
  logf_x = log_target(x);
}

}  // namespace

std::vector<Vector> slice_sample(const std::function<double(const Vector&)>& log_target,
                                 const Vector& x0, int n_samples, int burn_in, Rng& rng,
                                 double width, int max_step_out) {
  Vector x = x0;
  double logf_x = log_target(x);
  if (!std::isfinite(logf_x))
    throw std::invalid_argument("slice_sample: log target not finite at starting point");

  std::vector<Vector> samples;
  samples.reserve(n_samples);
  for (int s = 0; s < burn_in + n_samples; ++s) {
    for (int c = 0; c < x.size(); ++c)
      slice_coordinate(log_target, x, c, logf_x, rng, width, max_step_out);
    if (s >= burn_in) samples.push_back(x);
  }
  return samples;
}

}  // namespace ubo
