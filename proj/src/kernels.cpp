#include "ubo/kernels.hpp"

#include <cmath>

namespace ubo {

namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

// Squared scaled distances between column sets, ||(a-b)/l||^2 entrywise.
Matrix scaled_sqdist(const Vector& lengthscales, MatRef A, MatRef B) {
  const Matrix As = lengthscales.cwiseInverse().asDiagonal() * A;
  const Matrix Bs = lengthscales.cwiseInverse().asDiagonal() * B;
  const Vector a2 = As.colwise().squaredNorm();
  const Vector b2 = Bs.colwise().squaredNorm();
  Matrix d2 = (-2.0 * As.transpose() * Bs);
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  return d2.cwiseMax(0.0);
}

}  // namespace

double matern52_radial(double r) {
  const double u = kSqrt5 * r;
  return (1.0 + u + u * u / 3.0) * std::exp(-u);
}

double matern_eval(const MaternArdParams& p, VecRef x, VecRef y) {
  if (x.size() != y.size() || x.size() != p.lengthscales.size())
    throw std::invalid_argument("matern_eval: dimension mismatch");
  const double r = ((x - y).cwiseQuotient(p.lengthscales)).norm();
  return p.signal_variance * matern52_radial(r);
}

Matrix matern_cross(const MaternArdParams& p, MatRef A, MatRef B) {
  const Matrix r = scaled_sqdist(p.lengthscales, A, B).cwiseSqrt();
  const Matrix u = kSqrt5 * r;
  return p.signal_variance *
         ((1.0 + u.array() + u.array().square() / 3.0) * (-u.array()).exp()).matrix();
}

std::pair<double, Vector> spartan_weights(VecRef x, const SpartanHyperparams& hp) {
  const Matrix lam = spartan_weights_block(x, hp);
  return {lam(0, 0), lam.col(0).tail(lam.rows() - 1)};
}

Matrix spartan_weights_block(MatRef X, const SpartanHyperparams& hp) {
  const int M = static_cast<int>(hp.sigma_l.size());
  const auto m = X.cols();
  const double d = static_cast<double>(X.rows());
  Matrix logw(1 + M, m);
  const double sg2 = hp.sigma_g * hp.sigma_g;
  logw.row(0) = (-0.5 * d * std::log(2.0 * M_PI * sg2) -
                 (X.colwise() - hp.psi).colwise().squaredNorm().array() / (2.0 * sg2))
                    .matrix();
  for (int l = 0; l < M; ++l) {
    const double s2 = hp.sigma_l[l] * hp.sigma_l[l];
    logw.row(1 + l) =
        (-0.5 * d * std::log(2.0 * M_PI * s2) -
         (X.colwise() - hp.theta_p).colwise().squaredNorm().array() / (2.0 * s2))
            .matrix();
  }
  Matrix lam(1 + M, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mx = logw.col(j).maxCoeff();
    if (mx < -700.0) {
      // All weights underflow: global kernel dominates far away.
      lam.col(j).setZero();
      lam(0, j) = 1.0;
      continue;
    }
    const Eigen::ArrayXd w = (logw.col(j).array() - mx).exp();
    lam.col(j) = (w / w.sum()).sqrt().matrix();
  }
  return lam;
}

double spartan_eval(const SpartanHyperparams& hp, VecRef x, VecRef y) {
  const auto [lg_x, ll_x] = spartan_weights(x, hp);
  const auto [lg_y, ll_y] = spartan_weights(y, hp);
  double k = lg_x * lg_y * matern_eval(hp.theta_g, x, y);
  for (std::size_t l = 0; l < hp.theta_l.size(); ++l)
    k += ll_x(l) * ll_y(l) * matern_eval(hp.theta_l[l], x, y);
  return k;
}

Matrix spartan_cross(const SpartanHyperparams& hp, MatRef A, MatRef B) {
  const Matrix lam_a = spartan_weights_block(A, hp);
  const Matrix lam_b = spartan_weights_block(B, hp);
  Matrix k = lam_a.row(0).transpose() * lam_b.row(0);
  k = k.cwiseProduct(matern_cross(hp.theta_g, A, B));
  for (std::size_t l = 0; l < hp.theta_l.size(); ++l) {
    k += (lam_a.row(1 + l).transpose() * lam_b.row(1 + l))
             .cwiseProduct(matern_cross(hp.theta_l[l], A, B));
  }
  return k;
}

Kernel make_matern_kernel(MaternArdParams p) {
  return Kernel{
      [p](VecRef x, VecRef y) { return matern_eval(p, x, y); },
      [p](MatRef A, MatRef B) { return matern_cross(p, A, B); }};
}

Kernel make_spartan_kernel(SpartanHyperparams hp) {
  return Kernel{
      [hp](VecRef x, VecRef y) { return spartan_eval(hp, x, y); },
      [hp](MatRef A, MatRef B) { return spartan_cross(hp, A, B); }};
}

Kernel make_squared_exponential_kernel(Vector lengthscales, double signal_variance) {
  auto eval = [lengthscales, signal_variance](VecRef x, VecRef y) {
    const double r2 = ((x - y).cwiseQuotient(lengthscales)).squaredNorm();
    return signal_variance * std::exp(-0.5 * r2);
  };
  auto cross = [lengthscales, signal_variance](MatRef A, MatRef B) {
    const Matrix d2 = scaled_sqdist(lengthscales, A, B);
    return Matrix(signal_variance * (-0.5 * d2.array()).exp());
  };
  return Kernel{eval, cross};
}

}  // namespace ubo
