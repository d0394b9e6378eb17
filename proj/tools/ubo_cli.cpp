#include "ubo/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

ubo::ExperimentSpec overrides_spec(int budget, int init, double sigma, double beta) {
  ubo::ExperimentSpec spec;
  spec.budget = budget;
  spec.init_samples = init;
  spec.sigma = sigma;
  spec.beta = beta;
  return spec;
}

void write_trace(const ubo::Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  trace.write_csv(out);
}

int cmd_run(const std::string& problem_name, const std::string& method_name, int budget,
            int init, double sigma, std::uint64_t seed, double beta,
            const std::string& out_path) {
  ubo::Problem problem = ubo::make_problem(problem_name);
  if (sigma >= 0.0) problem.input_sigma = sigma;
  const auto spec = overrides_spec(budget, init, sigma, beta);
  const ubo::Method method = ubo::method_from_string(method_name);
  auto cfg = ubo::make_optimizer_config(problem, method, seed, spec);
  auto objective = ubo::make_noisy_objective(problem, ubo::derive_seed(seed, 1000));
  ubo::Optimizer opt(objective, problem.dim, cfg);
  const ubo::Trace trace = opt.run();
  write_trace(trace, out_path);
  std::cout << "wrote " << trace.records.size() << " evaluations to " << out_path << "\n";
  const auto& last = trace.records.back();
  std::cout << "incumbent value " << last.incumbent_value << " at [";
  for (int i = 0; i < trace.dim; ++i) std::cout << (i ? "," : "") << last.incumbent_x(i);
  std::cout << "]\n";
  return 0;
}

int cmd_bench(const std::string& spec_path, const std::string& out_path) {
  auto spec = ubo::ExperimentSpec::from_json_file(spec_path);
  if (!out_path.empty()) spec.out = out_path;
  const auto result = ubo::run_experiment(spec);
  std::ofstream out(spec.out);
  if (!out) throw std::runtime_error("cannot open output file '" + spec.out + "'");
  ubo::write_results_csv(result, out);
  std::cout << "wrote results for " << result.methods.size() << " methods to " << spec.out
            << "\n";
  return 0;
}

int cmd_cluster_sim(int nodes, const std::string& problem_name, double latency_ms,
                    double drop_rate, std::uint64_t seed, int budget, int init,
                    double sigma, double beta, const std::string& out_dir) {
  ubo::Problem problem = ubo::make_problem(problem_name);
  if (sigma >= 0.0) problem.input_sigma = sigma;
  const auto spec = overrides_spec(budget, init, sigma, beta);
  auto cfg = ubo::make_optimizer_config(problem, ubo::Method::UBO_SP, seed, spec);

  auto objective_for = [&](int node) {
    return ubo::make_noisy_objective(
        problem, ubo::derive_seed(seed, 2000 + static_cast<std::uint64_t>(node)));
  };
  // One simulated tick is ~100 ms of virtual wall time.
  const ubo::NetworkModel net{latency_ms / 100.0, drop_rate};
  const auto result = ubo::run_cluster(nodes, objective_for, problem.dim, cfg, net, seed);

  std::filesystem::create_directories(out_dir);
  for (int i = 0; i < nodes; ++i)
    write_trace(result.traces[i], out_dir + "/trace_node" + std::to_string(i) + ".csv");
  std::ofstream log(out_dir + "/messages.jsonl");
  for (const auto& msg : result.message_log) log << ubo::encode_message(msg) << "\n";
  std::cout << "wrote " << nodes << " node traces and " << result.message_log.size()
            << " messages to " << out_dir << "\n";
  return 0;
}

int cmd_cluster_tcp(int listen_port, const std::vector<std::string>& peers,
                    const std::string& node_id, const std::string& problem_name,
                    std::uint64_t seed, int budget, int init, double sigma, double beta,
                    const std::string& out_path) {
  ubo::Problem problem = ubo::make_problem(problem_name);
  if (sigma >= 0.0) problem.input_sigma = sigma;
  const auto spec = overrides_spec(budget, init, sigma, beta);
  auto cfg = ubo::make_optimizer_config(problem, ubo::Method::UBO_SP, seed, spec);

  auto objective = ubo::make_noisy_objective(problem, ubo::derive_seed(seed, 3000));
  ubo::Node node(node_id.empty() ? "port" + std::to_string(listen_port) : node_id,
                 objective, problem.dim, cfg);

  ubo::TcpBus bus(listen_port, peers);
  bus.start();
  node.initialize();
  for (const auto& msg : node.drain_outbox()) bus.broadcast(msg);
  for (int t = 0; t < cfg.budget; ++t) {
    for (const auto& msg : bus.poll()) node.merge(msg);
    if (!node.step()) break;
    for (const auto& msg : node.drain_outbox()) bus.broadcast(msg);
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  for (const auto& msg : bus.poll()) node.merge(msg);
  bus.stop();

  write_trace(node.optimizer().trace(), out_path);
  std::cout << "node " << node.id() << " finished with " << node.dataset().size()
            << " dataset points; trace written to " << out_path << "\n";
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& problem_name,
               std::uint64_t seed, int budget, double sigma, double beta,
               const std::string& out_path) {
  ubo::Problem problem = ubo::make_problem(problem_name);
  if (sigma >= 0.0) problem.input_sigma = sigma;

  std::ifstream log(log_path);
  if (!log) throw std::runtime_error("cannot open log file '" + log_path + "'");
  std::vector<ubo::QueryMessage> history;
  std::string line;
  std::size_t malformed = 0;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    if (auto msg = ubo::decode_message(line))
      history.push_back(std::move(*msg));
    else
      ++malformed;
  }

  auto spec = overrides_spec(budget, -1, sigma, beta);
  auto cfg = ubo::make_optimizer_config(problem, ubo::Method::UBO_SP, seed, spec);
  auto objective = ubo::make_noisy_objective(problem, ubo::derive_seed(seed, 4000));
  ubo::Node node("replay", objective, problem.dim, cfg);
  node.bootstrap(history);
  std::cout << "bootstrapped " << node.dataset().size() << " points from " << history.size()
            << " messages (" << malformed << " malformed)\n";

  node.initialize();
  for (int t = 0; t < cfg.budget; ++t)
    if (!node.step()) break;
  if (!out_path.empty()) {
    write_trace(node.optimizer().trace(), out_path);
    std::cout << "trace written to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unscented Bayesian optimization with stochastic meta-policies"};
  app.require_subcommand(1);

  std::string problem = "gm2d", method = "BO", out = "trace.csv", spec_path, node_id,
              log_path, out_dir = "cluster_out";
  std::vector<std::string> peers;
  int budget = -1, init = -1, nodes = 4, listen_port = -1;
  double sigma = -1.0, beta = 20.0, latency_ms = 0.0, drop_rate = 0.0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "single optimization run, trace to CSV");
  run->add_option("--problem", problem)->check(CLI::IsMember(ubo::problem_names()));
  run->add_option("--method", method, "BO | UBO | UBO-SP");
  run->add_option("--budget", budget);
  run->add_option("--init", init);
  run->add_option("--sigma", sigma);
  run->add_option("--seed", seed);
  run->add_option("--beta", beta);
  run->add_option("--out", out);

  auto* bench = app.add_subcommand("bench", "experiment from a JSON spec");
  bench->add_option("--spec", spec_path)->required();
  bench->add_option("--out", out)->required();

  auto* cluster = app.add_subcommand("cluster", "distributed optimization");
  cluster->add_option("--nodes", nodes);
  cluster->add_option("--problem", problem)->check(CLI::IsMember(ubo::problem_names()));
  cluster->add_option("--latency-ms", latency_ms);
  cluster->add_option("--drop-rate", drop_rate);
  cluster->add_option("--seed", seed);
  cluster->add_option("--budget", budget);
  cluster->add_option("--init", init);
  cluster->add_option("--sigma", sigma);
  cluster->add_option("--beta", beta);
  cluster->add_option("--out", out_dir, "output directory (simulated mode)");
  cluster->add_option("--listen", listen_port, "TCP mode: listening port");
  cluster->add_option("--peers", peers, "TCP mode: peer host:port list")->delimiter(',');
  cluster->add_option("--id", node_id, "TCP mode: node identifier");
  cluster->add_option("--trace-out", out, "TCP mode: trace output file");

  auto* replay = app.add_subcommand("replay", "bootstrap a node from a message log");
  replay->add_option("--log", log_path)->required();
  replay->add_option("--problem", problem)->check(CLI::IsMember(ubo::problem_names()));
  replay->add_option("--seed", seed);
  replay->add_option("--budget", budget);
  replay->add_option("--sigma", sigma);
  replay->add_option("--beta", beta);
  replay->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(problem, method, budget, init, sigma, seed, beta, out);
    if (*bench) return cmd_bench(spec_path, out);
    if (*cluster) {
      if (listen_port > 0)
        return cmd_cluster_tcp(listen_port, peers, node_id, problem, seed, budget, init,
                               sigma, beta, out);
      return cmd_cluster_sim(nodes, problem, latency_ms, drop_rate, seed, budget, init,
                             sigma, beta, out_dir);
    }
    if (*replay) return cmd_replay(log_path, problem, seed, budget, sigma, beta, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
