#include "ubo/distributed.hpp"

#include <nlohmann/json.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <queue>

namespace ubo {

std::string encode_message(const QueryMessage& msg) {
  nlohmann::json j;
  j["node_id"] = msg.node_id;
  j["seq"] = msg.seq;
  j["x"] = std::vector<double>(msg.x.data(), msg.x.data() + msg.x.size());
  j["y"] = msg.y;
  return j.dump();
}

std::optional<QueryMessage> decode_message(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    QueryMessage msg;
    msg.node_id = j.at("node_id").get<std::string>();
    msg.seq = j.at("seq").get<std::uint64_t>();
    const auto xs = j.at("x").get<std::vector<double>>();
    msg.x = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    msg.y = j.at("y").get<double>();
    if (!std::isfinite(msg.y) || !msg.x.allFinite()) return std::nullopt;
    return msg;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

Node::Node(std::string id, std::function<double(VecRef)> objective, int dim,
           OptimizerConfig cfg)
    : id_(std::move(id)), opt_(std::move(objective), dim, cfg) {}

bool Node::merge(const QueryMessage& msg) {
  if (msg.x.size() != opt_.dim() || !std::isfinite(msg.y) ||
      (msg.x.array() < 0.0).any() || (msg.x.array() > 1.0).any()) {
    ++rejected_;
    return false;
  }
  if (!seen_.insert({msg.node_id, msg.seq}).second) return false;
  if (msg.node_id == id_) return false;  // echo of our own broadcast
  opt_.absorb(msg.x, msg.y, Provenance::ReceivedRemote);
  return true;
}

void Node::bootstrap(const std::vector<QueryMessage>& history) {
  for (const auto& msg : history) merge(msg);
}

void Node::initialize() {
  opt_.initialize();
  for (const auto& r : opt_.trace().records) emit(r.x, r.y);
}

bool Node::step() {
  if (!opt_.iterate()) return false;
  const auto& r = opt_.last_evaluation();
  emit(r.x, r.y);
  return true;
}

void Node::emit(VecRef x, double y) {
  QueryMessage msg{id_, next_seq_++, x, y};
  seen_.insert({msg.node_id, msg.seq});
  outbox_.push_back(std::move(msg));
}

std::vector<QueryMessage> Node::drain_outbox() {
  auto out = std::move(outbox_);
  outbox_.clear();
  return out;
}

ClusterRun run_cluster(int n_nodes,
                       const std::function<std::function<double(VecRef)>(int)>& objective_for,
                       int dim, OptimizerConfig per_node_cfg, const NetworkModel& net,
                       std::uint64_t seed) {
  if (n_nodes < 1) throw std::invalid_argument("run_cluster: n_nodes >= 1 required");

  std::vector<std::unique_ptr<Node>> nodes;
  for (int i = 0; i < n_nodes; ++i) {
    OptimizerConfig cfg = per_node_cfg;
    cfg.seed = n_nodes == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(i));
    // Partition one shared Sobol design: node i takes points
    // [i*p, (i+1)*p), so the union matches a single-node design of n*p.
    cfg.init_sobol_skip = per_node_cfg.init_sobol_skip + i * per_node_cfg.init_samples;
    nodes.push_back(
        std::make_unique<Node>("node" + std::to_string(i), objective_for(i), dim, cfg));
  }

  Rng net_rng(derive_seed(seed, 0x6e6574));  // network stream
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> latency(
      net.latency_ticks > 0.0 ? 1.0 / net.latency_ticks : 1e12);

  struct InFlight {
    int tick;
    int receiver;
    QueryMessage msg;
  };
  auto later = [](const InFlight& a, const InFlight& b) { return a.tick > b.tick; };
  std::priority_queue<InFlight, std::vector<InFlight>, decltype(later)> in_flight(later);

  ClusterRun result;
  auto broadcast = [&](int sender, int tick, std::vector<QueryMessage> msgs) {
    for (auto& msg : msgs) {
      result.message_log.push_back(msg);
      for (int r = 0; r < n_nodes; ++r) {
        if (r == sender) continue;
        if (net.drop_rate > 0.0 && unit(net_rng) < net.drop_rate) continue;
        const int delay =
            net.latency_ticks > 0.0 ? static_cast<int>(std::floor(latency(net_rng))) : 0;
        in_flight.push({tick + 1 + delay, r, msg});
      }
    }
  };

  for (int i = 0; i < n_nodes; ++i) {
    nodes[i]->initialize();
    broadcast(i, -1, nodes[i]->drain_outbox());
  }

  for (int tick = 0; tick < per_node_cfg.budget; ++tick) {
    for (int i = 0; i < n_nodes; ++i) {
      // Drain everything due for this node; never block on the network.
      std::vector<InFlight> put_back;
      while (!in_flight.empty() && in_flight.top().tick <= tick) {
        InFlight f = in_flight.top();
        in_flight.pop();
        if (f.receiver == i)
          nodes[i]->merge(f.msg);
        else
          put_back.push_back(std::move(f));
      }
      for (auto& f : put_back) in_flight.push(std::move(f));
      if (nodes[i]->step()) broadcast(i, tick, nodes[i]->drain_outbox());
    }
  }

  // Quiescence: deliver everything still in flight.
  while (!in_flight.empty()) {
    const InFlight& f = in_flight.top();
    nodes[f.receiver]->merge(f.msg);
    in_flight.pop();
  }

  for (auto& node : nodes) {
    result.traces.push_back(node->optimizer().trace());
    result.final_datasets.push_back(node->dataset());
  }
  return result;
}

// ---------------------------------------------------------------------------
// TCP transport

namespace {

bool write_all(int fd, const char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, 0);
    if (n <= 0) return false;
    data += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

bool read_all(int fd, char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::recv(fd, data, len, 0);
    if (n <= 0) return false;
    data += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

TcpBus::TcpBus(int listen_port, std::vector<std::string> peers)
    : listen_port_(listen_port), peers_(std::move(peers)) {}

TcpBus::~TcpBus() { stop(); }

void TcpBus::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("TcpBus: socket() failed");
  int opt = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &opt, sizeof(opt));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(static_cast<std::uint16_t>(listen_port_));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 16) != 0)
    throw std::runtime_error("TcpBus: bind/listen failed on port " +
                             std::to_string(listen_port_));
  running_ = true;
  {
    std::lock_guard<std::mutex> lock(threads_mutex_);
    threads_.emplace_back([this] { accept_loop(); });
  }

  for (const auto& peer : peers_) {
    const auto colon = peer.rfind(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("TcpBus: peer must be host:port, got '" + peer + "'");
    const std::string host = peer.substr(0, colon);
    const std::string port = peer.substr(colon + 1);

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0)
      throw std::runtime_error("TcpBus: cannot resolve peer '" + peer + "'");

    int fd = -1;
    for (int attempt = 0; attempt < 100; ++attempt) {
      fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw std::runtime_error("TcpBus: cannot connect to peer '" + peer + "'");
    peer_fds_.push_back(fd);
  }
}

void TcpBus::stop() {
  if (!running_) return;
  running_ = false;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  for (int fd : peer_fds_) ::shutdown(fd, SHUT_RDWR);
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(threads_mutex_);
    // Unblock reader threads parked in recv() on inbound connections.
    for (int fd : accepted_fds_) ::shutdown(fd, SHUT_RDWR);
    workers = std::move(threads_);
    threads_.clear();
  }
  for (auto& t : workers)
    if (t.joinable()) t.join();
  for (int fd : peer_fds_) ::close(fd);
  peer_fds_.clear();
  accepted_fds_.clear();  // reader threads close their own fds on exit
}

void TcpBus::broadcast(const QueryMessage& msg) {
  const std::string body = encode_message(msg);
  const auto len = static_cast<std::uint32_t>(body.size());
  char header[4] = {static_cast<char>(len >> 24), static_cast<char>(len >> 16),
                    static_cast<char>(len >> 8), static_cast<char>(len)};
  std::lock_guard<std::mutex> lock(send_mutex_);
  for (int fd : peer_fds_) {
    write_all(fd, header, 4);
    write_all(fd, body.data(), body.size());
  }
}

std::vector<QueryMessage> TcpBus::poll() {
  std::lock_guard<std::mutex> lock(inbox_mutex_);
  auto out = std::move(inbox_);
  inbox_.clear();
  return out;
}

void TcpBus::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;
    std::lock_guard<std::mutex> lock(threads_mutex_);
    if (!running_) {
      ::close(fd);
      return;
    }
    accepted_fds_.push_back(fd);
    threads_.emplace_back([this, fd] { reader_loop(fd); });
  }
}

void TcpBus::reader_loop(int fd) {
  for (;;) {
    char header[4];
    if (!read_all(fd, header, 4)) break;
    const std::uint32_t len = (static_cast<std::uint32_t>(static_cast<unsigned char>(header[0])) << 24) |
                              (static_cast<std::uint32_t>(static_cast<unsigned char>(header[1])) << 16) |
                              (static_cast<std::uint32_t>(static_cast<unsigned char>(header[2])) << 8) |
                              static_cast<std::uint32_t>(static_cast<unsigned char>(header[3]));
    if (len > (1u << 20)) break;  // oversized frame: treat as protocol error
    std::string body(len, '\0');
    if (!read_all(fd, body.data(), len)) break;
    if (auto msg = decode_message(body)) {
      std::lock_guard<std::mutex> lock(inbox_mutex_);
      inbox_.push_back(std::move(*msg));
    }
  }
  ::close(fd);
}

}  // namespace ubo
