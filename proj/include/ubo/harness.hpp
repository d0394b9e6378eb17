#pragma once

#include "ubo/distributed.hpp"
#include "ubo/problems.hpp"

#include <iosfwd>
#include <map>

namespace ubo {

// Monte-Carlo estimate of the integrated outcome g(x) over the problem's
// input-noise distribution. The perturbation stream is derived from
// (seed, evaluation index) by the caller so all methods score against
// identical noise sets.
double integrated_outcome(const Problem& problem, VecRef x, int n_mc, std::uint64_t seed);

// Objective wrapper owning its own noise stream; never touches optimizer RNG.
std::function<double(VecRef)> make_noisy_objective(const Problem& problem,
                                                   std::uint64_t seed);

struct ExperimentSpec {
  std::string problem;
  std::vector<std::string> methods{"BO", "UBO", "UBO-SP"};  // may include UBO-SPx4
  int repetitions = 20;
  std::uint64_t seed = 0;
  std::string out;
  // Overrides; negative means "use the problem preset".
  int budget = -1;
  int init_samples = -1;
  double sigma = -1.0;
  double beta = 20.0;
  int mc_samples = 1000;
  int cluster_nodes = 4;

  static ExperimentSpec from_json_file(const std::string& path);
  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct MethodResult {
  std::string method;
  Matrix outcomes;              // repetitions x (p + T), integrated outcome per eval
  std::vector<Trace> traces;    // combined trace per repetition
  Vector mean, ci_lo, ci_hi;    // across repetitions, per eval index
};

struct ExperimentResult {
  std::vector<MethodResult> methods;
};

OptimizerConfig make_optimizer_config(const Problem& problem, Method method,
                                      std::uint64_t seed, const ExperimentSpec& spec);

// Run every (method, repetition) pair with common random numbers
// (optimizer seed = base + repetition) and per-method noise streams, scoring
// the incumbent after each evaluation. Parallel across repetitions, capped
// by UBO_THREADS; reduction order is deterministic.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// CSV export: method,eval_index,mean,ci_lo,ci_hi.
void write_results_csv(const ExperimentResult& result, std::ostream& os);

}  // namespace ubo
