#pragma once

#include "ubo/types.hpp"

#include <functional>
#include <utility>

namespace ubo {

// Matern-5/2 with automatic relevance determination.
struct MaternArdParams {
  Vector lengthscales;          // one per input dimension, all > 0
  double signal_variance = 1.0; // > 0
};

double matern52_radial(double r);
double matern_eval(const MaternArdParams& p, VecRef x, VecRef y);
// Cross-covariance between column sets A (d x n) and B (d x m).
Matrix matern_cross(const MaternArdParams& p, MatRef A, MatRef B);

// Nonstationary composite kernel: a near-uniform global kernel plus M local
// kernels whose influence regions share a common center theta_p with
// different spreads (funnel structure).
struct SpartanHyperparams {
  MaternArdParams theta_g;
  std::vector<MaternArdParams> theta_l;  // size M >= 1
  Vector theta_p;                        // funnel center, in [0,1]^d
  Vector psi;                            // global weight center
  double sigma_g = 10.0;                 // > max(sigma_l)
  std::vector<double> sigma_l;           // size M, all > 0
};

// Normalized weights (lambda_g, lambda_l[1..M]) at x; sum of squares is 1.
std::pair<double, Vector> spartan_weights(VecRef x, const SpartanHyperparams& hp);
// Weights for a column set of points: (1+M) x m matrix of lambda values.
Matrix spartan_weights_block(MatRef X, const SpartanHyperparams& hp);

double spartan_eval(const SpartanHyperparams& hp, VecRef x, VecRef y);
Matrix spartan_cross(const SpartanHyperparams& hp, MatRef A, MatRef B);

// Type-erased kernel handle with a batched cross-covariance path.
struct Kernel {
  std::function<double(VecRef, VecRef)> eval;
  std::function<Matrix(MatRef, MatRef)> cross;

  double operator()(VecRef x, VecRef y) const { return eval(x, y); }
};

Kernel make_matern_kernel(MaternArdParams p);
Kernel make_spartan_kernel(SpartanHyperparams hp);
Kernel make_squared_exponential_kernel(Vector lengthscales, double signal_variance = 1.0);

}  // namespace ubo
