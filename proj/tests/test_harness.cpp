#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ubo/harness.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace ubo;

TEST_CASE("integrated outcomes are deterministic in the seed") {
  const Problem prob = make_problem("gm2d");
  const Vector x = gm_broad_center();
  const double a = integrated_outcome(prob, x, 500, 7);
  const double b = integrated_outcome(prob, x, 500, 7);
  const double c = integrated_outcome(prob, x, 500, 8);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("with zero input noise the integrated outcome is the function value") {
  Problem prob = make_problem("gm2d");
  prob.input_sigma = 0.0;
  const Vector x = gm_broad_center();
  CHECK(integrated_outcome(prob, x, 10, 1) == doctest::Approx(gm_eval(x)).epsilon(1e-14));
}

TEST_CASE("the integrated outcome matches a direct Monte-Carlo oracle") {
  // Linear objective away from the boundary: clamping never triggers and
  // symmetric noise leaves the expectation unchanged.
  Problem prob;
  prob.name = "linear";
  prob.dim = 2;
  prob.input_sigma = 0.05;
  prob.eval = [](VecRef x) { return 2.0 * x(0) - x(1); };
  Vector x(2);
  x << 0.5, 0.4;
  const double estimate = integrated_outcome(prob, x, 200000, 3);
  CHECK(estimate == doctest::Approx(2.0 * 0.5 - 0.4).epsilon(2e-3));
}

TEST_CASE("noisy objectives draw from independent streams per seed") {
  const Problem prob = make_problem("rkhs");
  auto f1 = make_noisy_objective(prob, 5);
  auto f1b = make_noisy_objective(prob, 5);
  auto f2 = make_noisy_objective(prob, 6);
  const Vector x = Vector::Constant(1, 0.4);
  CHECK(f1(x) == f1b(x));
  CHECK(f1(x) != f2(x));  // streams advance independently
}

TEST_CASE("experiment specs parse from JSON with defaults") {
  const auto j = nlohmann::json::parse(R"({
    "problem": "rkhs",
    "methods": ["BO", "UBO-SP"],
    "repetitions": 3,
    "seed": 11,
    "budget": 6,
    "init": 4,
    "sigma": 0.03,
    "beta": 2.0,
    "mc_samples": 50,
    "nodes": 2
  })");
  const auto spec = ExperimentSpec::from_json(j);
  CHECK(spec.problem == "rkhs");
  REQUIRE(spec.methods.size() == 2);
  CHECK(spec.methods[1] == "UBO-SP");
  CHECK(spec.repetitions == 3);
  CHECK(spec.seed == 11);
  CHECK(spec.budget == 6);
  CHECK(spec.init_samples == 4);
  CHECK(spec.sigma == doctest::Approx(0.03));
  CHECK(spec.beta == doctest::Approx(2.0));
  CHECK(spec.mc_samples == 50);
  CHECK(spec.cluster_nodes == 2);

  const auto minimal = ExperimentSpec::from_json(nlohmann::json::parse(R"({"problem":"gm2d"})"));
  CHECK(minimal.methods.size() == 3);
  CHECK(minimal.repetitions == 20);
  CHECK(minimal.budget == -1);
}

TEST_CASE("optimizer configs inherit problem presets unless overridden") {
  const Problem prob = make_problem("gm2d");
  ExperimentSpec spec;
  const auto cfg = make_optimizer_config(prob, Method::UBO, 3, spec);
  CHECK(cfg.budget == prob.budget);
  CHECK(cfg.init_samples == prob.init_samples);
  CHECK(cfg.input_sigma == doctest::Approx(prob.input_sigma));
  spec.budget = 7;
  spec.init_samples = 2;
  spec.sigma = 0.1;
  const auto over = make_optimizer_config(prob, Method::UBO, 3, spec);
  CHECK(over.budget == 7);
  CHECK(over.init_samples == 2);
  CHECK(over.input_sigma == doctest::Approx(0.1));
}

TEST_CASE("a small experiment produces well-formed results") {
  setenv("UBO_THREADS", "1", 1);
  ExperimentSpec spec;
  spec.problem = "rkhs";
  spec.methods = {"BO", "UBO-SP"};
  spec.repetitions = 2;
  spec.seed = 13;
  spec.budget = 3;
  spec.init_samples = 3;
  spec.mc_samples = 50;
  const auto result = run_experiment(spec);
  REQUIRE(result.methods.size() == 2);
  for (const auto& m : result.methods) {
    CHECK(m.outcomes.rows() == 2);
    CHECK(m.outcomes.cols() == 6);
    CHECK(m.outcomes.allFinite());
    CHECK(m.mean.size() == 6);
    for (Eigen::Index c = 0; c < 6; ++c) {
      CHECK(m.ci_lo(c) <= m.mean(c));
      CHECK(m.mean(c) <= m.ci_hi(c));
    }
  }
  // The confidence half-width matches the normal-approximation oracle.
  const auto& m0 = result.methods[0];
  const Vector col = m0.outcomes.col(5);
  const double mean = col.mean();
  const double sd = std::sqrt((col.array() - mean).square().sum() / 1.0);
  CHECK(m0.ci_hi(5) - m0.mean(5) == doctest::Approx(1.96 * sd / std::sqrt(2.0)).epsilon(1e-12));

  std::ostringstream os;
  write_results_csv(result, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "method,eval_index,mean,ci_lo,ci_hi");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("experiments share optimizer seeds across methods (common random numbers)") {
  setenv("UBO_THREADS", "1", 1);
  ExperimentSpec spec;
  spec.problem = "rkhs";
  spec.methods = {"BO", "BO"};
  spec.repetitions = 1;
  spec.seed = 17;
  spec.budget = 2;
  spec.init_samples = 3;
  spec.mc_samples = 20;
  spec.sigma = 0.0;  // no observation-side noise: runs must coincide exactly
  const auto result = run_experiment(spec);
  const auto& a = result.methods[0].traces[0];
  const auto& b = result.methods[1].traces[0];
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].y == b.records[i].y);
  }
}

TEST_CASE("the cluster variant keeps the total evaluation budget") {
  setenv("UBO_THREADS", "1", 1);
  ExperimentSpec spec;
  spec.problem = "rkhs";
  spec.methods = {"UBO-SPx4"};
  spec.repetitions = 1;
  spec.seed = 19;
  spec.budget = 8;
  spec.init_samples = 4;
  spec.mc_samples = 20;
  spec.cluster_nodes = 4;
  const auto result = run_experiment(spec);
  const auto& trace = result.methods[0].traces[0];
  // 4 nodes x (1 init + 2 iterations) = 12 evaluations total.
  CHECK(trace.records.size() == 12);
  for (std::size_t i = 0; i < trace.records.size(); ++i)
    CHECK(trace.records[i].eval_index == static_cast<int>(i));
}
