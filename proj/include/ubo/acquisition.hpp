#pragma once

#include "ubo/hyper.hpp"
#include "ubo/sobol.hpp"

namespace ubo {

// A scalar field over [0,1]^d with an optional batched evaluation path
// (columns of a d x m matrix).
struct ScalarField {
  std::function<double(VecRef)> at;
  std::function<Vector(MatRef)> at_block;

  static ScalarField from_pointwise(std::function<double(VecRef)> f);
};

struct Incumbent {
  Vector location;
  double value = 0.0;
};

// Expected improvement for maximization; exact at sigma = 0.
double expected_improvement(const Prediction& pred, double incumbent);

// Monte-Carlo average of per-hyperparameter-sample EI.
double mcmc_ei(const HyperSampleSet& hypers, VecRef x, double incumbent);
Vector mcmc_ei_block(const HyperSampleSet& hypers, MatRef Q, double incumbent);
ScalarField make_mcmc_ei_field(const HyperSampleSet& hypers, double incumbent);

struct MetaPolicyConfig {
  double beta = 1.0;
  int candidate_count = 0;  // 0 means the 500 * d default
  bool normalize = true;
};

int default_candidate_count(int dim);

// Greedy inner optimization: rank Sobol candidates, refine the best 5 with
// Nelder-Mead (200 evaluations each), return the overall best.
Vector select_greedy(const ScalarField& acq, MatRef candidates, Rng& rng);
Vector select_greedy(const ScalarField& acq, int dim, int candidate_count, Rng& rng);

// Boltzmann meta-policy discretized on the candidate set: sample an index
// with probability proportional to exp(beta * value).
Vector select_stochastic(const ScalarField& acq, MatRef candidates,
                         const MetaPolicyConfig& cfg, Rng& rng);
Vector select_stochastic(const ScalarField& acq, int dim, const MetaPolicyConfig& cfg,
                         Rng& rng);

}  // namespace ubo
