#pragma once

#include "asec/estimators.h"
#include "asec/manifest.h"

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

namespace asec::remote {

// Wire protocol, one JSON object per line:
//   request  {"action": <string>, "level": <int >= 1>}
//   reply    {"lb": <number>, "ub": <number|null>, "time_ms": <number>}
//            or {"error": <string>}

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // Accepts "host:port". Throws ConfigError.
  static Endpoint parse(std::string_view text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// Answers estimator requests from a manifest.
class ManifestResponder {
 public:
  explicit ManifestResponder(EstimatorManifest manifest);

  // Reply line (without the trailing newline) for one request line.
  std::string respond(std::string_view request) const;
  // Reported time of a request, used by the server's real-latency mode.
  double latency_ms(std::string_view request) const;

 private:
  const ManifestEntry *lookup(std::string_view request, int &level,
                              std::string &error) const;

  EstimatorManifest manifest_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Threaded TCP server. Each connection is served by its own thread.
class EstimatorServer {
 public:
  EstimatorServer(EstimatorManifest manifest, Endpoint bind,
                  bool real_latency = false);
  ~EstimatorServer();

  EstimatorServer(const EstimatorServer &) = delete;
  EstimatorServer &operator=(const EstimatorServer &) = delete;

  // Actual bound port (useful when binding port 0).
  std::uint16_t port() const { return port_; }

  void start();
  // Blocks until stop() is called from another thread.
  void serve_forever();
  void stop();
  std::size_t requests_served() const { return served_.load(); }

 private:
  void accept_loop();
  void serve_connection(int fd);

  ManifestResponder responder_;
  bool real_latency_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> served_{0};
  std::thread acceptor_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
};

// Synchronous blocking client. Connection and protocol failures surface as
// EstimatorUnavailable.
class RemoteSource : public EstimatorSource {
 public:
  explicit RemoteSource(Endpoint endpoint, double timeout_s = 10.0);
  ~RemoteSource() override;

  RemoteSource(const RemoteSource &) = delete;
  RemoteSource &operator=(const RemoteSource &) = delete;

  Estimate estimate(const PlanningTask &task, ActionId action,
                    int level) override;

  // Raw request, exposed for protocol tests.
  Estimate request(const std::string &action, int level);

 private:
  void connect_once();
  void disconnect();
  std::string read_line();

  Endpoint endpoint_;
  double timeout_s_;
  int fd_ = -1;
  std::string buffer_;
};

} // namespace asec::remote
