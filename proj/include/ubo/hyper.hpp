#pragma once

#include "ubo/gp.hpp"
#include "ubo/slice.hpp"

namespace ubo {

// Parameter vector layout (M local kernels, input dimension d):
//   [log ls_g (d), log sf2_g,
//    {log ls_l (d), log sf2_l} x M,
//    theta_p (d),
//    log sigma_l x M]
// Positive parameters live in log space so slice-sampling widths are
// scale-free.
struct SpartanModel {
  int dim = 1;
  int n_local = 1;
  double sigma_g = 10.0;
  double noise_variance = 1e-2;

  int n_params() const { return (n_local + 1) * (dim + 1) + dim + n_local; }
  Vector initial_point() const;
  SpartanHyperparams unpack(const Vector& theta) const;
  Kernel kernel(const Vector& theta) const;
  double log_prior(const Vector& theta) const;
};

struct HyperSample {
  Vector theta;
  GPState gp;
};

struct HyperSampleSet {
  std::vector<HyperSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  const Vector& last_theta() const { return samples.back().theta; }
};

// Fully Bayesian hyperparameter refresh: slice-sample the log posterior
// (marginal likelihood + prior) and fit one GP per retained sample.
HyperSampleSet resample_hypers(const Dataset& data, const SpartanModel& model, int n,
                               int burn_in, Rng& rng, const Vector* warm_start = nullptr);

// MCMC-averaged posterior mean field.
double posterior_mean(const HyperSampleSet& hypers, VecRef x);
Vector posterior_mean_block(const HyperSampleSet& hypers, MatRef Q);

}  // namespace ubo
