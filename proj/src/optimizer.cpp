#include "ubo/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace ubo {

Method method_from_string(const std::string& name) {
  if (name == "BO" || name == "bo") return Method::BO;
  if (name == "UBO" || name == "ubo") return Method::UBO;
  if (name == "UBO-SP" || name == "ubo-sp") return Method::UBO_SP;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::BO: return "BO";
    case Method::UBO: return "UBO";
    case Method::UBO_SP: return "UBO-SP";
  }
  return "?";
}

void Trace::write_csv(std::ostream& os) const {
  os << "eval_index,iter";
  for (int i = 0; i < dim; ++i) os << ",x_" << i;
  os << ",y";
  for (int i = 0; i < dim; ++i) os << ",inc_x_" << i;
  os << ",inc_value,wall_ms\n";
  os.precision(17);
  for (const auto& r : records) {
    os << r.eval_index << ',' << r.iter;
    for (int i = 0; i < dim; ++i) os << ',' << r.x(i);
    os << ',' << r.y;
    for (int i = 0; i < dim; ++i) os << ',' << r.incumbent_x(i);
    os << ',' << r.incumbent_value << ',' << r.wall_ms << '\n';
  }
}

Optimizer::Optimizer(std::function<double(VecRef)> objective, int dim, OptimizerConfig cfg)
    : objective_(std::move(objective)),
      dim_(dim),
      cfg_(cfg),
      ut_(UTConfig::isotropic(dim, cfg.input_sigma, cfg.ut_alpha, cfg.ut_kappa)),
      data_(dim),
      rng_(derive_seed(cfg.seed, 1)),
      init_sobol_(dim, static_cast<std::uint64_t>(cfg.init_sobol_skip)),
      candidate_sobol_(
          dim, static_cast<std::uint64_t>(cfg.init_sobol_skip + cfg.init_samples)) {
  if (cfg.budget < 0 || cfg.init_samples < 1)
    throw std::invalid_argument("Optimizer: budget >= 0 and init_samples >= 1 required");
  trace_.dim = dim;
  model_ = SpartanModel{dim, cfg.local_kernels, 10.0, cfg.noise_variance};
  if (cfg_.meta.candidate_count <= 0)
    cfg_.meta.candidate_count = default_candidate_count(dim);
}

void Optimizer::initialize() {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < cfg_.init_samples; ++i) {
    const auto t0 = clock::now();
    const Vector x = init_sobol_.next();
    const double y = objective_(x);
    if (!std::isfinite(y))
      throw std::runtime_error("Optimizer: non-finite objective during initialization");
    data_.add(x, y, Provenance::Init);
    // Init rows carry the plain best-so-far incumbent.
    Eigen::Index best;
    data_.values().maxCoeff(&best);
    incumbent_ = {data_.point(best), data_.values()(best)};
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    record(0, x, y, ms);
  }
}

void Optimizer::refresh_hypers() {
  const int burn = warm_start_ ? cfg_.burn_in_step : cfg_.burn_in_first;
  hypers_ = resample_hypers(data_, model_, cfg_.mcmc_samples, burn, rng_,
                            warm_start_ ? &*warm_start_ : nullptr);
  warm_start_ = hypers_.last_theta();
}

Incumbent Optimizer::compute_incumbent() const {
  if (cfg_.method == Method::BO) {
    Eigen::Index best;
    data_.values().maxCoeff(&best);
    return {data_.point(best), data_.values()(best)};
  }
  auto mean_field = [this](MatRef Q) { return posterior_mean_block(hypers_, Q); };
  const auto [x, g] = unscented_incumbent(mean_field, data_, ut_);
  return {x, g};
}

ScalarField Optimizer::build_acquisition() const {
  if (cfg_.method == Method::BO) return make_mcmc_ei_field(hypers_, incumbent_.value);
  const UTConfig ut = ut_;
  const HyperSampleSet* hypers = &hypers_;
  const double rho = incumbent_.value;
  return {[hypers, rho, ut](VecRef x) {
            return ut_expectation([&](VecRef s) { return mcmc_ei(*hypers, s, rho); }, x, ut);
          },
          [hypers, rho, ut](MatRef Q) {
            return ut_expectation_block(
                [&](MatRef S) { return mcmc_ei_block(*hypers, S, rho); }, Q, ut);
          }};
}

bool Optimizer::iterate() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  ++iter_;

  refresh_hypers();
  incumbent_ = compute_incumbent();
  const ScalarField acq = build_acquisition();

  Vector x;
  double y = std::numeric_limits<double>::quiet_NaN();
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Matrix candidates = candidate_sobol_.block(cfg_.meta.candidate_count);
    x = cfg_.method == Method::UBO_SP ? select_stochastic(acq, candidates, cfg_.meta, rng_)
                                      : select_greedy(acq, candidates, rng_);
    y = objective_(x);
    if (std::isfinite(y)) break;
  }
  if (!std::isfinite(y)) {
    trace_.aborted = true;
    return false;
  }

  data_.add(x, y, Provenance::Selected);
  // Refresh the incumbent with the new observation (model unchanged until
  // the next resample).
  if (cfg_.method == Method::BO) {
    incumbent_ = compute_incumbent();
  } else if (incumbent_.location.size() > 0) {
    auto mean_field = [this](MatRef Q) { return posterior_mean_block(hypers_, Q); };
    const double g_new = ut_expectation_block(mean_field, x, ut_)(0);
    if (g_new > incumbent_.value) incumbent_ = {x, g_new};
  }
  const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  record(iter_, x, y, ms);
  return true;
}

Trace Optimizer::run() {
  initialize();
  for (int t = 0; t < cfg_.budget; ++t)
    if (!iterate()) break;
  return trace_;
}

void Optimizer::absorb(VecRef x, double y, Provenance tag) {
  if (!std::isfinite(y)) throw std::invalid_argument("Optimizer::absorb: non-finite value");
  data_.add(x, y, tag);
}

void Optimizer::record(int iter, VecRef x, double y, double wall_ms) {
  trace_.records.push_back(
      {eval_index_++, iter, x, y, incumbent_.location, incumbent_.value, wall_ms});
}

}  // namespace ubo
