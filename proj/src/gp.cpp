#include "ubo/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace ubo {

GPState fit(const Dataset& data, Kernel kernel, double noise_variance) {
  if (data.empty()) throw std::invalid_argument("gp::fit: empty dataset");
  if (noise_variance < 0.0) throw std::invalid_argument("gp::fit: negative noise variance");
  if (!data.values().allFinite())
    throw std::invalid_argument("gp::fit: non-finite observation value");

  GPState state;
  state.data = data;
  state.kernel = kernel;
  state.noise_variance = noise_variance;

  const auto n = data.size();
  state.y_offset = data.values().mean();
  const double sd = std::sqrt((data.values().array() - state.y_offset).square().sum() /
                              static_cast<double>(n));
  state.y_scale = sd > 1e-12 ? sd : 1.0;
  const Vector y_std = (data.values().array() - state.y_offset) / state.y_scale;

  Matrix gram = kernel.cross(data.points(), data.points());
  gram = 0.5 * (gram + gram.transpose());  // symmetrize against roundoff
  gram.diagonal().array() += noise_variance;

  double jitter = 0.0;
  for (;;) {
    Matrix k = gram;
    k.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() == Eigen::Success) {
      state.chol_lower = llt.matrixL();
      state.jitter = jitter;
      break;
    }
    if (jitter == 0.0)
      jitter = 1e-10;
    else if (jitter < 1e-4)
      jitter *= 10.0;
    else
      throw std::runtime_error("gp::fit: singular model (Cholesky failed at max jitter)");
  }

  state.alpha = state.chol_lower.transpose().triangularView<Eigen::Upper>().solve(
      state.chol_lower.triangularView<Eigen::Lower>().solve(y_std));
  return state;
}

Prediction predict(const GPState& state, VecRef xq) {
  if (xq.size() != state.data.dim())
    throw std::invalid_argument("gp::predict: dimension mismatch");
  Vector mean(1), var(1);
  predict_block(state, xq, mean, var);
  return {mean(0), var(0)};
}

void predict_block(const GPState& state, MatRef Q, Vector& mean, Vector& variance) {
  if (Q.rows() != state.data.dim())
    throw std::invalid_argument("gp::predict_block: dimension mismatch");
  const Matrix kq = state.kernel.cross(state.data.points(), Q);  // n x m
  const Vector mean_std = kq.transpose() * state.alpha;
  const Matrix v = state.chol_lower.triangularView<Eigen::Lower>().solve(kq);

  const auto m = Q.cols();
  mean.resize(m);
  variance.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double kxx = state.kernel.eval(Q.col(j), Q.col(j));
    const double var_std = std::max(0.0, kxx - v.col(j).squaredNorm());
    mean(j) = state.y_offset + state.y_scale * mean_std(j);
    variance(j) = state.y_scale * state.y_scale * var_std;
  }
}

Prediction prior_predict(const Kernel& kernel, VecRef xq) {
  return {0.0, kernel.eval(xq, xq)};
}

double log_marginal_likelihood(const GPState& state) {
  const auto n = state.data.size();
  const Vector y_std =
      (state.data.values().array() - state.y_offset) / state.y_scale;
  // Jacobian of the internal standardization, so values are comparable
  // across observation scales.
  return -0.5 * y_std.dot(state.alpha) -
         state.chol_lower.diagonal().array().log().sum() -
         0.5 * static_cast<double>(n) * std::log(2.0 * M_PI) -
         static_cast<double>(n) * std::log(state.y_scale);
}

}  // namespace ubo
