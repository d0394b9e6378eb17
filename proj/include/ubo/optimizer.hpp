#pragma once

#include "ubo/acquisition.hpp"
#include "ubo/unscented.hpp"

#include <iosfwd>
#include <optional>

namespace ubo {

enum class Method { BO, UBO, UBO_SP };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct OptimizerConfig {
  Method method = Method::BO;
  int budget = 40;        // T
  int init_samples = 5;   // p
  // Number of leading Sobol points to skip before drawing the initial
  // design; cluster nodes use it to partition one shared design.
  int init_sobol_skip = 0;
  double ut_alpha = 1.0;
  double ut_kappa = 0.0;
  double input_sigma = 0.02;
  MetaPolicyConfig meta;
  std::uint64_t seed = 0;
  int mcmc_samples = 10;
  int burn_in_first = 100;
  int burn_in_step = 10;
  double noise_variance = 1e-2;
  int local_kernels = 1;
};

struct TraceRecord {
  int eval_index = 0;
  int iter = 0;
  Vector x;
  double y = 0.0;
  Vector incumbent_x;
  double incumbent_value = 0.0;
  double wall_ms = 0.0;
};

struct Trace {
  int dim = 0;
  std::vector<TraceRecord> records;
  bool aborted = false;

  void write_csv(std::ostream& os) const;
};

// Outer loop: Sobol initialization, then per iteration hyperparameter
// resampling, acquisition construction, query selection, and evaluation.
// Single-owner mutable state; not shared across threads.
class Optimizer {
 public:
  Optimizer(std::function<double(VecRef)> objective, int dim, OptimizerConfig cfg);

  void initialize();
  // One iteration: refresh hypers, select and evaluate a query. Returns
  // false if the run was aborted by repeated non-finite observations.
  bool iterate();
  Trace run();

  // Append a remote observation; it joins the dataset for later fits.
  void absorb(VecRef x, double y, Provenance tag = Provenance::ReceivedRemote);

  const Dataset& dataset() const { return data_; }
  const Trace& trace() const { return trace_; }
  const OptimizerConfig& config() const { return cfg_; }
  int dim() const { return dim_; }
  Incumbent incumbent() const { return incumbent_; }
  // Query/observation pair recorded by the most recent local evaluation.
  const TraceRecord& last_evaluation() const { return trace_.records.back(); }

 private:
  void refresh_hypers();
  Incumbent compute_incumbent() const;
  ScalarField build_acquisition() const;
  void record(int iter, VecRef x, double y, double wall_ms);

  std::function<double(VecRef)> objective_;
  int dim_;
  OptimizerConfig cfg_;
  UTConfig ut_;
  Dataset data_;
  Trace trace_;
  Rng rng_;
  SobolSequence init_sobol_;
  SobolSequence candidate_sobol_;
  HyperSampleSet hypers_;
  SpartanModel model_;
  std::optional<Vector> warm_start_;
  Incumbent incumbent_;
  int iter_ = 0;
  int eval_index_ = 0;
};

}  // namespace ubo
