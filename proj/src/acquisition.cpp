#include "ubo/acquisition.hpp"

#include "ubo/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ubo {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

ScalarField ScalarField::from_pointwise(std::function<double(VecRef)> f) {
  auto block = [f](MatRef Q) {
    Vector out(Q.cols());
    for (Eigen::Index j = 0; j < Q.cols(); ++j) out(j) = f(Q.col(j));
    return out;
  };
  return {std::move(f), std::move(block)};
}

double expected_improvement(const Prediction& pred, double incumbent) {
  const double improvement = pred.mean - incumbent;
  const double sigma = std::sqrt(std::max(0.0, pred.variance));
  if (sigma < 1e-14) return std::max(0.0, improvement);
  const double z = improvement / sigma;
  return std::max(0.0, improvement * normal_cdf(z) + sigma * normal_pdf(z));
}

double mcmc_ei(const HyperSampleSet& hypers, VecRef x, double incumbent) {
  double acc = 0.0;
  for (const auto& s : hypers.samples) acc += expected_improvement(predict(s.gp, x), incumbent);
  return acc / hypers.size();
}

Vector mcmc_ei_block(const HyperSampleSet& hypers, MatRef Q, double incumbent) {
  Vector acc = Vector::Zero(Q.cols());
  Vector mean, var;
  for (const auto& s : hypers.samples) {
    predict_block(s.gp, Q, mean, var);
    for (Eigen::Index j = 0; j < Q.cols(); ++j)
      acc(j) += expected_improvement({mean(j), var(j)}, incumbent);
  }
  return acc / hypers.size();
}

ScalarField make_mcmc_ei_field(const HyperSampleSet& hypers, double incumbent) {
  return {[&hypers, incumbent](VecRef x) { return mcmc_ei(hypers, x, incumbent); },
          [&hypers, incumbent](MatRef Q) { return mcmc_ei_block(hypers, Q, incumbent); }};
}

int default_candidate_count(int dim) { return 500 * dim; }

Vector select_greedy(const ScalarField& acq, MatRef candidates, Rng&) {
  const Vector values = acq.at_block(candidates);
  const auto m = values.size();

  // Top 5 candidate indices; ties keep the earlier index.
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });

  Vector best_x = candidates.col(order[0]);
  double best_f = values(order[0]);
  const int n_starts = static_cast<int>(std::min<Eigen::Index>(5, m));
  for (int s = 0; s < n_starts; ++s) {
    const auto [x, f] = nelder_mead_max(acq.at, candidates.col(order[s]), 200);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

Vector select_greedy(const ScalarField& acq, int dim, int candidate_count, Rng& rng) {
  SobolSequence sobol(dim);
  return select_greedy(acq, sobol.block(candidate_count), rng);
}

Vector select_stochastic(const ScalarField& acq, MatRef candidates,
                         const MetaPolicyConfig& cfg, Rng& rng) {
  if (cfg.beta <= 0.0) throw std::invalid_argument("select_stochastic: beta must be > 0");
  Vector v = acq.at_block(candidates);
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (hi - lo < 1e-300) {
    // Flat acquisition: uniform over candidates.
    const auto idx = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(v.size()));
    return candidates.col(std::min(idx, v.size() - 1));
  }
  if (cfg.normalize) v = ((v.array() - lo) / (hi - lo)).matrix();

  const Eigen::ArrayXd logits = cfg.beta * v.array();
  const Eigen::ArrayXd p = (logits - logits.maxCoeff()).exp();
  const double z = p.sum();
  double u = unit(rng) * z;
  Eigen::Index idx = 0;
  for (; idx < p.size() - 1; ++idx) {
    u -= p(idx);
    if (u <= 0.0) break;
  }
  return candidates.col(idx);
}

Vector select_stochastic(const ScalarField& acq, int dim, const MetaPolicyConfig& cfg,
                         Rng& rng) {
  const int count = cfg.candidate_count > 0 ? cfg.candidate_count : default_candidate_count(dim);
  SobolSequence sobol(dim);
  return select_stochastic(acq, sobol.block(count), cfg, rng);
}

}  // namespace ubo
