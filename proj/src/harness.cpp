#include "ubo/harness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

namespace ubo {

double integrated_outcome(const Problem& problem, VecRef x, int n_mc, std::uint64_t seed) {
  if (problem.input_sigma <= 0.0) return problem.eval(x);
  Rng rng(seed);
  double acc = 0.0;
  for (int i = 0; i < n_mc; ++i) acc += noisy_query(problem, x, rng);
  return acc / n_mc;
}

std::function<double(VecRef)> make_noisy_objective(const Problem& problem,
                                                   std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [problem, rng](VecRef x) { return noisy_query(problem, x, *rng); };
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.problem = j.at("problem").get<std::string>();
  if (j.contains("methods")) spec.methods = j["methods"].get<std::vector<std::string>>();
  spec.repetitions = j.value("repetitions", spec.repetitions);
  spec.seed = j.value("seed", spec.seed);
  spec.out = j.value("out", spec.out);
  spec.budget = j.value("budget", spec.budget);
  spec.init_samples = j.value("init", spec.init_samples);
  spec.sigma = j.value("sigma", spec.sigma);
  spec.beta = j.value("beta", spec.beta);
  spec.mc_samples = j.value("mc_samples", spec.mc_samples);
  spec.cluster_nodes = j.value("nodes", spec.cluster_nodes);
  return spec;
}

OptimizerConfig make_optimizer_config(const Problem& problem, Method method,
                                      std::uint64_t seed, const ExperimentSpec& spec) {
  OptimizerConfig cfg;
  cfg.method = method;
  cfg.budget = spec.budget >= 0 ? spec.budget : problem.budget;
  cfg.init_samples = spec.init_samples >= 1 ? spec.init_samples : problem.init_samples;
  cfg.input_sigma = spec.sigma >= 0.0 ? spec.sigma : problem.input_sigma;
  cfg.meta.beta = spec.beta;
  cfg.seed = seed;
  return cfg;
}

namespace {

int harness_threads() {
  if (const char* env = std::getenv("UBO_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Round-robin interleave of per-node traces: the x-axis counts function
// evaluations, so a k-node cluster contributes k records per step.
Trace interleave_traces(const std::vector<Trace>& traces) {
  Trace out;
  out.dim = traces.front().dim;
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.records.size());
  int idx = 0;
  for (std::size_t k = 0; k < longest; ++k) {
    for (const auto& t : traces) {
      if (k >= t.records.size()) continue;
      TraceRecord r = t.records[k];
      r.eval_index = idx++;
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

struct Task {
  int method_index;
  int repetition;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const Problem base_problem = make_problem(spec.problem);
  Problem problem = base_problem;
  if (spec.sigma >= 0.0) problem.input_sigma = spec.sigma;

  ExperimentResult result;
  result.methods.resize(spec.methods.size());
  for (std::size_t m = 0; m < spec.methods.size(); ++m)
    result.methods[m].method = spec.methods[m];

  std::vector<Task> tasks;
  for (std::size_t m = 0; m < spec.methods.size(); ++m)
    for (int r = 0; r < spec.repetitions; ++r)
      tasks.push_back({static_cast<int>(m), r});

  std::vector<std::vector<Trace>> traces(spec.methods.size(),
                                         std::vector<Trace>(spec.repetitions));

  auto run_task = [&](const Task& task) {
    const std::string& name = spec.methods[task.method_index];
    const std::uint64_t run_seed = spec.seed + static_cast<std::uint64_t>(task.repetition);

    if (name == "UBO-SPx4" || name == "UBO-SPx" + std::to_string(spec.cluster_nodes)) {
      const int nodes = spec.cluster_nodes;
      OptimizerConfig cfg = make_optimizer_config(problem, Method::UBO_SP, run_seed, spec);
      cfg.init_samples = std::max(1, cfg.init_samples / nodes);
      cfg.budget = cfg.budget / nodes;
      auto objective_for = [&](int node) {
        return make_noisy_objective(
            problem, derive_seed(run_seed, 2000 + static_cast<std::uint64_t>(node)));
      };
      const auto cluster =
          run_cluster(nodes, objective_for, problem.dim, cfg, NetworkModel{}, run_seed);
      traces[task.method_index][task.repetition] = interleave_traces(cluster.traces);
    } else {
      const Method method = method_from_string(name);
      OptimizerConfig cfg = make_optimizer_config(problem, method, run_seed, spec);
      auto objective = make_noisy_objective(
          problem,
          derive_seed(run_seed, 1000 + static_cast<std::uint64_t>(task.method_index)));
      Optimizer opt(objective, problem.dim, cfg);
      traces[task.method_index][task.repetition] = opt.run();
    }
  };

  const int n_threads = std::min<int>(harness_threads(), static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < n_threads; ++w)
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      });
    for (auto& t : workers) t.join();
  }

  // Score incumbents with per-evaluation-index common perturbation seeds.
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    auto& mr = result.methods[m];
    mr.traces = std::move(traces[m]);
    std::size_t n_evals = 0;
    for (const auto& t : mr.traces) n_evals = std::max(n_evals, t.records.size());
    mr.outcomes = Matrix::Constant(spec.repetitions, static_cast<Eigen::Index>(n_evals),
                                   std::numeric_limits<double>::quiet_NaN());
    for (int r = 0; r < spec.repetitions; ++r) {
      const auto& records = mr.traces[r].records;
      for (std::size_t t = 0; t < records.size(); ++t) {
        mr.outcomes(r, static_cast<Eigen::Index>(t)) =
            integrated_outcome(problem, records[t].incumbent_x, spec.mc_samples,
                               derive_seed(spec.seed, t));
      }
    }
    const auto cols = mr.outcomes.cols();
    mr.mean.resize(cols);
    mr.ci_lo.resize(cols);
    mr.ci_hi.resize(cols);
    const double n = static_cast<double>(spec.repetitions);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Vector col = mr.outcomes.col(c);
      const double mean = col.mean();
      double half = 0.0;
      if (spec.repetitions > 1) {
        const double var = (col.array() - mean).square().sum() / (n - 1.0);
        half = 1.96 * std::sqrt(var / n);
      }
      mr.mean(c) = mean;
      mr.ci_lo(c) = mean - half;
      mr.ci_hi(c) = mean + half;
    }
  }
  return result;
}

void write_results_csv(const ExperimentResult& result, std::ostream& os) {
  os << "method,eval_index,mean,ci_lo,ci_hi\n";
  os.precision(17);
  for (const auto& m : result.methods)
    for (Eigen::Index c = 0; c < m.mean.size(); ++c)
      os << m.method << ',' << c << ',' << m.mean(c) << ',' << m.ci_lo(c) << ','
         << m.ci_hi(c) << '\n';
}

}  // namespace ubo
