#pragma once

#include "ubo/optimizer.hpp"

#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace ubo {

// The distributed wire unit: one evaluated query and its observation.
struct QueryMessage {
  std::string node_id;
  std::uint64_t seq = 0;
  Vector x;
  double y = 0.0;
};

std::string encode_message(const QueryMessage& msg);
std::optional<QueryMessage> decode_message(const std::string& text);

// One optimization node: a full UBO-SP loop plus idempotent merge of remote
// observations. Owns its state exclusively.
class Node {
 public:
  Node(std::string id, std::function<double(VecRef)> objective, int dim,
       OptimizerConfig cfg);

  const std::string& id() const { return id_; }
  // Idempotent: a (node_id, seq) pair already seen is a no-op. Returns true
  // if the message was applied.
  bool merge(const QueryMessage& msg);
  std::size_t rejected_count() const { return rejected_; }

  // Seed the dataset from a broadcast history before running (late join).
  void bootstrap(const std::vector<QueryMessage>& history);

  void initialize();
  bool step();
  // Messages produced by local evaluations since the last drain.
  std::vector<QueryMessage> drain_outbox();

  const Optimizer& optimizer() const { return opt_; }
  const Dataset& dataset() const { return opt_.dataset(); }

 private:
  void emit(VecRef x, double y);

  std::string id_;
  Optimizer opt_;
  std::uint64_t next_seq_ = 0;
  std::set<std::pair<std::string, std::uint64_t>> seen_;
  std::vector<QueryMessage> outbox_;
  std::size_t rejected_ = 0;
};

// Simulated network: per-message delivery latency (exponential, in scheduler
// ticks) and independent drop probability.
struct NetworkModel {
  double latency_ticks = 0.0;
  double drop_rate = 0.0;
};

// Deterministic interleaved scheduler driving n nodes for cfg.budget
// iterations each. Node i runs with seed derive_seed(seed, i). The objective
// factory supplies each node its own evaluation stream.
struct ClusterRun {
  std::vector<Trace> traces;
  std::vector<QueryMessage> message_log;
  std::vector<Dataset> final_datasets;
};

ClusterRun run_cluster(int n_nodes,
                       const std::function<std::function<double(VecRef)>(int)>& objective_for,
                       int dim, OptimizerConfig per_node_cfg, const NetworkModel& net,
                       std::uint64_t seed);

// Full-mesh TCP transport: length-prefixed JSON frames, one connection per
// peer. Inbound messages accumulate until polled.
class TcpBus {
 public:
  TcpBus(int listen_port, std::vector<std::string> peers);
  ~TcpBus();

  void start();
  void stop();
  void broadcast(const QueryMessage& msg);
  std::vector<QueryMessage> poll();

 private:
  void accept_loop();
  void reader_loop(int fd);

  int listen_port_;
  std::vector<std::string> peers_;
  int listen_fd_ = -1;
  std::vector<int> peer_fds_;
  std::vector<int> accepted_fds_;  // guarded by threads_mutex_
  std::mutex threads_mutex_;
  std::vector<std::thread> threads_;
  std::mutex inbox_mutex_;
  std::vector<QueryMessage> inbox_;
  std::mutex send_mutex_;
  bool running_ = false;
};

}  // namespace ubo
