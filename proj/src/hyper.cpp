#include "ubo/hyper.hpp"

#include <cmath>
#include <limits>

namespace ubo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSigmaLo = std::log(0.01);
const double kLogSigmaHi = std::log(0.5);

double log_normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

}  // namespace

Vector SpartanModel::initial_point() const {
  Vector theta(n_params());
  int k = 0;
  for (int b = 0; b < n_local + 1; ++b) {
    for (int i = 0; i < dim; ++i) theta(k++) = std::log(0.2);
    theta(k++) = 0.0;  // log signal variance
  }
  for (int i = 0; i < dim; ++i) theta(k++) = 0.5;  // theta_p
  for (int l = 0; l < n_local; ++l) theta(k++) = std::log(0.1);
  return theta;
}

SpartanHyperparams SpartanModel::unpack(const Vector& theta) const {
  SpartanHyperparams hp;
  int k = 0;
  auto read_matern = [&]() {
    MaternArdParams p;
    p.lengthscales = theta.segment(k, dim).array().exp().matrix();
    k += dim;
    p.signal_variance = std::exp(theta(k++));
    return p;
  };
  hp.theta_g = read_matern();
  for (int l = 0; l < n_local; ++l) hp.theta_l.push_back(read_matern());
  hp.theta_p = theta.segment(k, dim);
  k += dim;
  for (int l = 0; l < n_local; ++l) hp.sigma_l.push_back(std::exp(theta(k++)));
  hp.sigma_g = sigma_g;
  hp.psi = hp.theta_p;  // global influence center tied to the funnel center
  return hp;
}

Kernel SpartanModel::kernel(const Vector& theta) const {
  return make_spartan_kernel(unpack(theta));
}

double SpartanModel::log_prior(const Vector& theta) const {
  double lp = 0.0;
  int k = 0;
  for (int b = 0; b < n_local + 1; ++b) {
    for (int i = 0; i < dim; ++i) lp += log_normal_pdf(theta(k++), std::log(0.1), 1.0);
    lp += log_normal_pdf(theta(k++), 0.0, 1.0);
  }
  for (int i = 0; i < dim; ++i) {
    const double tp = theta(k++);
    if (tp < 0.0 || tp > 1.0) return kNegInf;
  }
  for (int l = 0; l < n_local; ++l) {
    const double ls = theta(k++);
    if (ls < kLogSigmaLo || ls > kLogSigmaHi) return kNegInf;
  }
  return lp;
}

HyperSampleSet resample_hypers(const Dataset& data, const SpartanModel& model, int n,
                               int burn_in, Rng& rng, const Vector* warm_start) {
  if (data.empty()) throw std::invalid_argument("resample_hypers: empty dataset");

  auto log_posterior = [&](const Vector& theta) {
    const double lp = model.log_prior(theta);
    if (!std::isfinite(lp)) return kNegInf;
    try {
      const GPState state = fit(data, model.kernel(theta), model.noise_variance);
      const double lml = log_marginal_likelihood(state);
      return std::isfinite(lml) ? lml + lp : kNegInf;
    } catch (const std::runtime_error&) {
      return kNegInf;
    }
  };

  Vector x0 = warm_start ? *warm_start : model.initial_point();
  if (!std::isfinite(log_posterior(x0))) x0 = model.initial_point();

  HyperSampleSet out;
  const auto thetas = slice_sample(log_posterior, x0, n, burn_in, rng);
  for (Vector theta : thetas) {
    for (int attempt = 0;; ++attempt) {
      try {
        out.samples.push_back({theta, fit(data, model.kernel(theta), model.noise_variance)});
        break;
      } catch (const std::runtime_error&) {
        if (attempt >= 5) throw;
        // Re-draw a replacement sample from the chain.
        theta = slice_sample(log_posterior,
                             out.samples.empty() ? x0 : out.samples.back().theta, 1, 0, rng)
                    .front();
      }
    }
  }
  return out;
}

double posterior_mean(const HyperSampleSet& hypers, VecRef x) {
  double acc = 0.0;
  for (const auto& s : hypers.samples) acc += predict(s.gp, x).mean;
  return acc / hypers.size();
}

Vector posterior_mean_block(const HyperSampleSet& hypers, MatRef Q) {
  Vector acc = Vector::Zero(Q.cols());
  Vector mean, var;
  for (const auto& s : hypers.samples) {
    predict_block(s.gp, Q, mean, var);
    acc += mean;
  }
  return acc / hypers.size();
}

}  // namespace ubo
