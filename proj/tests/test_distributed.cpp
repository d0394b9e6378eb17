#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ubo/distributed.hpp"

#include <algorithm>
#include <cmath>

using namespace ubo;

namespace {

double bump(VecRef x) {
  return std::exp(-30.0 * (x - Vector::Constant(x.size(), 0.4)).squaredNorm());
}

OptimizerConfig small_config(std::uint64_t seed = 5) {
  OptimizerConfig cfg;
  cfg.method = Method::UBO_SP;
  cfg.budget = 3;
  cfg.init_samples = 3;
  cfg.seed = seed;
  cfg.burn_in_first = 20;
  cfg.burn_in_step = 5;
  cfg.mcmc_samples = 3;
  cfg.meta.candidate_count = 60;
  return cfg;
}

std::vector<std::pair<double, double>> sorted_pairs(const Dataset& data) {
  std::vector<std::pair<double, double>> out;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    out.emplace_back(data.values()(i), data.point(i).sum());
  std::sort(out.begin(), out.end());
  return out;
}

QueryMessage sample_message(double x0 = 0.3, double y = 1.5, std::uint64_t seq = 0,
                            const std::string& id = "peer") {
  return {id, seq, Vector::Constant(1, x0), y};
}

}  // namespace

TEST_CASE("messages survive an encode/decode round trip at full precision") {
  QueryMessage msg{"node3", 17, Vector(2), -0.12345678901234567};
  msg.x << 0.1234567890123456, 0.9999999999999999;
  const auto decoded = decode_message(encode_message(msg));
  REQUIRE(decoded.has_value());
  CHECK(decoded->node_id == "node3");
  CHECK(decoded->seq == 17);
  CHECK(decoded->x == msg.x);
  CHECK(decoded->y == msg.y);
}

TEST_CASE("malformed or non-finite messages decode to nothing") {
  CHECK(!decode_message("not json").has_value());
  CHECK(!decode_message("{\"node_id\":\"a\"}").has_value());
  CHECK(!decode_message("{\"node_id\":\"a\",\"seq\":0,\"x\":[0.5],\"y\":null}").has_value());
  QueryMessage msg = sample_message();
  msg.y = std::nan("");
  CHECK(!decode_message(encode_message(msg)).has_value());
}

TEST_CASE("merging is idempotent") {
  Node node("n0", bump, 1, small_config());
  const auto msg = sample_message();
  CHECK(node.merge(msg));
  const auto size_after = node.dataset().size();
  CHECK(!node.merge(msg));  // duplicate (node_id, seq) is a no-op
  CHECK(node.dataset().size() == size_after);
  CHECK(node.rejected_count() == 0);
}

TEST_CASE("merging is commutative up to dataset ordering") {
  std::vector<QueryMessage> msgs;
  for (int i = 0; i < 5; ++i)
    msgs.push_back(sample_message(0.1 + 0.15 * i, static_cast<double>(i), i));
  Node a("a", bump, 1, small_config());
  Node b("b", bump, 1, small_config());
  for (const auto& m : msgs) a.merge(m);
  for (auto it = msgs.rbegin(); it != msgs.rend(); ++it) b.merge(*it);
  CHECK(sorted_pairs(a.dataset()) == sorted_pairs(b.dataset()));
}

TEST_CASE("invalid remote observations are counted and skipped") {
  Node node("n0", bump, 1, small_config());
  auto bad_dim = sample_message();
  bad_dim.x = Vector::Constant(2, 0.5);
  CHECK(!node.merge(bad_dim));
  auto out_of_box = sample_message(1.5, 0.0, 1);
  CHECK(!node.merge(out_of_box));
  auto bad_y = sample_message(0.5, std::nan(""), 2);
  CHECK(!node.merge(bad_y));
  CHECK(node.rejected_count() == 3);
  CHECK(node.dataset().size() == 0);
}

TEST_CASE("a node ignores echoes of its own broadcasts") {
  Node node("n0", bump, 1, small_config());
  node.initialize();
  const auto own = node.drain_outbox();
  REQUIRE(!own.empty());
  const auto size_before = node.dataset().size();
  for (const auto& m : own) CHECK(!node.merge(m));
  CHECK(node.dataset().size() == size_before);
}

TEST_CASE("a lossless quiescent cluster reaches identical datasets") {
  auto objective_for = [](int) { return bump; };
  const auto result = run_cluster(3, objective_for, 1, small_config(), {0.0, 0.0}, 7);
  REQUIRE(result.final_datasets.size() == 3);
  const auto ref = sorted_pairs(result.final_datasets[0]);
  CHECK(ref.size() == 3 * 6);  // every node holds all 3 * (init + budget) points
  for (int i = 1; i < 3; ++i) CHECK(sorted_pairs(result.final_datasets[i]) == ref);
  CHECK(result.message_log.size() == 3 * 6);
}

TEST_CASE("latency and drops delay but do not corrupt the run") {
  auto objective_for = [](int) { return bump; };
  const auto result = run_cluster(2, objective_for, 1, small_config(), {2.0, 0.3}, 9);
  for (const auto& data : result.final_datasets) {
    CHECK(data.size() >= 6);        // at least its own evaluations
    CHECK(data.size() <= 12);
    CHECK(data.values().allFinite());
  }
  // Fully lossy network: nodes only ever see their own points.
  const auto lossy = run_cluster(2, objective_for, 1, small_config(), {0.0, 1.0}, 9);
  for (const auto& data : lossy.final_datasets) CHECK(data.size() == 6);
}

TEST_CASE("a one-node cluster reproduces the standalone optimizer") {
  const std::uint64_t seed = 21;
  OptimizerConfig cfg = small_config(seed);
  auto objective_for = [](int) { return bump; };
  const auto cluster = run_cluster(1, objective_for, 1, cfg, {0.0, 0.0}, seed);
  Optimizer solo(bump, 1, cfg);
  const Trace ts = solo.run();
  const Trace& tc = cluster.traces[0];
  REQUIRE(ts.records.size() == tc.records.size());
  for (std::size_t i = 0; i < ts.records.size(); ++i) {
    CHECK(ts.records[i].x == tc.records[i].x);
    CHECK(ts.records[i].y == tc.records[i].y);
    CHECK(ts.records[i].incumbent_x == tc.records[i].incumbent_x);
    CHECK(ts.records[i].incumbent_value == tc.records[i].incumbent_value);
  }
}

TEST_CASE("a late joiner bootstraps from the broadcast history") {
  auto objective_for = [](int) { return bump; };
  const auto result = run_cluster(2, objective_for, 1, small_config(), {0.0, 0.0}, 11);
  Node late("late", bump, 1, small_config(99));
  late.bootstrap(result.message_log);
  CHECK(late.dataset().size() == static_cast<Eigen::Index>(result.message_log.size()));
  // Replayed history is a no-op the second time.
  late.bootstrap(result.message_log);
  CHECK(late.dataset().size() == static_cast<Eigen::Index>(result.message_log.size()));
  // The late node can continue optimizing from the merged data.
  late.initialize();
  CHECK(late.step());
}

TEST_CASE("the TCP bus delivers framed messages between two endpoints") {
  TcpBus a(46311, {"127.0.0.1:46312"});
  TcpBus b(46312, {"127.0.0.1:46311"});
  std::thread tb([&] { b.start(); });
  a.start();
  tb.join();

  auto msg = sample_message(0.25, 2.5, 3, "alpha");
  a.broadcast(msg);
  std::vector<QueryMessage> got;
  for (int i = 0; i < 100 && got.empty(); ++i) {
    got = b.poll();
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(got.size() == 1);
  CHECK(got[0].node_id == "alpha");
  CHECK(got[0].seq == 3);
  CHECK(got[0].x == msg.x);
  CHECK(got[0].y == msg.y);

  // And the reverse direction.
  b.broadcast(sample_message(0.75, -1.0, 9, "beta"));
  got.clear();
  for (int i = 0; i < 100 && got.empty(); ++i) {
    got = a.poll();
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(got.size() == 1);
  CHECK(got[0].node_id == "beta");
  a.stop();
  b.stop();
}
