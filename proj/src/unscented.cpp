#include "ubo/unscented.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace ubo {

namespace {

// Scaled offsets: columns of chol((d + gamma) * input_cov).
Matrix sigma_offsets(const UTConfig& cfg) {
  const int d = cfg.dim();
  const double scale = static_cast<double>(d) + cfg.gamma();
  if (scale <= 0.0) throw std::invalid_argument("unscented: d + gamma must be positive");
  Eigen::LLT<Matrix> llt(scale * cfg.input_cov);
  if (llt.info() != Eigen::Success) {
    // Allow an exactly-zero covariance (degenerate but well defined).
    if (cfg.input_cov.isZero(0.0)) return Matrix::Zero(d, d);
    throw std::invalid_argument("unscented: input covariance is not PSD");
  }
  return llt.matrixL();
}

Vector sigma_weights(const UTConfig& cfg) {
  const int d = cfg.dim();
  const double denom = static_cast<double>(d) + cfg.gamma();
  Vector w(2 * d + 1);
  w(0) = cfg.gamma() / denom;
  w.tail(2 * d).setConstant(1.0 / (2.0 * denom));
  return w;
}

}  // namespace

SigmaSet sigma_points(VecRef xbar, const UTConfig& cfg) {
  const int d = cfg.dim();
  if (xbar.size() != d) throw std::invalid_argument("sigma_points: dimension mismatch");
  const Matrix offsets = sigma_offsets(cfg);

  SigmaSet set;
  set.points.resize(d, 2 * d + 1);
  set.points.col(0) = xbar;
  for (int i = 0; i < d; ++i) {
    set.points.col(1 + i) = clamp_unit(xbar + offsets.col(i));
    set.points.col(1 + d + i) = clamp_unit(xbar - offsets.col(i));
  }
  set.weights = sigma_weights(cfg);
  return set;
}

double ut_expectation(const std::function<double(VecRef)>& fn, VecRef xbar,
                      const UTConfig& cfg) {
  const SigmaSet set = sigma_points(xbar, cfg);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < set.weights.size(); ++i) {
    const double v = fn(set.points.col(i));
    if (!std::isfinite(v)) throw std::runtime_error("ut_expectation: non-finite value");
    acc += set.weights(i) * v;
  }
  return acc;
}

Vector ut_expectation_block(const std::function<Vector(MatRef)>& fn_block, MatRef X,
                            const UTConfig& cfg) {
  const int d = cfg.dim();
  const int s = 2 * d + 1;
  const auto m = X.cols();
  const Matrix offsets = sigma_offsets(cfg);
  const Vector w = sigma_weights(cfg);

  Matrix expanded(d, s * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    expanded.col(s * j) = X.col(j);
    for (int i = 0; i < d; ++i) {
      expanded.col(s * j + 1 + i) = clamp_unit(X.col(j) + offsets.col(i));
      expanded.col(s * j + 1 + d + i) = clamp_unit(X.col(j) - offsets.col(i));
    }
  }
  const Vector values = fn_block(expanded);
  Vector out(m);
  for (Eigen::Index j = 0; j < m; ++j) out(j) = w.dot(values.segment(s * j, s));
  return out;
}

std::pair<Vector, double> unscented_incumbent(
    const std::function<Vector(MatRef)>& field_block, const Dataset& data,
    const UTConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("unscented_incumbent: empty dataset");
  const Vector g = ut_expectation_block(field_block, data.points(), cfg);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i)
    if (g(i) > g(best)) best = i;
  return {data.point(best), g(best)};
}

}  // namespace ubo
