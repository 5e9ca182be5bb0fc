#include "asec/remote.h"

#include "asec/errors.h"

#include "json.hpp"

#include <spdlog/spdlog.h>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>

namespace asec::remote {

using nlohmann::json;

namespace {

constexpr int kPollMs = 100;

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t sent = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(sent));
  }
  return true;
}

} // namespace

Endpoint Endpoint::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == text.size())
    throw ConfigError("endpoint must be host:port, got '" + std::string(text) +
                      "'");
  Endpoint endpoint;
  endpoint.host = std::string(text.substr(0, colon));
  if (endpoint.host.empty()) endpoint.host = "127.0.0.1";
  unsigned port = 0;
  auto digits = text.substr(colon + 1);
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                   port);
  if (ec != std::errc() || end != digits.data() + digits.size() || port > 65535)
    throw ConfigError("invalid port in endpoint '" + std::string(text) + "'");
  endpoint.port = static_cast<std::uint16_t>(port);
  return endpoint;
}

ManifestResponder::ManifestResponder(EstimatorManifest manifest)
    : manifest_(std::move(manifest)) {
  for (std::size_t i = 0; i < manifest_.entries.size(); ++i)
    index_.emplace(manifest_.entries[i].action, i);
}

const ManifestEntry *ManifestResponder::lookup(std::string_view request,
                                               int &level,
                                               std::string &error) const {
  json doc = json::parse(request, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    error = "malformed request";
    return nullptr;
  }
  auto action = doc.find("action");
  auto lvl = doc.find("level");
  if (action == doc.end() || !action->is_string() || lvl == doc.end() ||
      !lvl->is_number_integer()) {
    error = "request needs action and level";
    return nullptr;
  }
  auto it = index_.find(action->get<std::string>());
  if (it == index_.end()) {
    error = "unknown action";
    return nullptr;
  }
  const auto &entry = manifest_.entries[it->second];
  level = lvl->get<int>();
  if (level < 1 || level > static_cast<int>(entry.levels.size())) {
    error = "level out of range";
    return nullptr;
  }
  return &entry;
}

std::string ManifestResponder::respond(std::string_view request) const {
  int level = 0;
  std::string error;
  const ManifestEntry *entry = lookup(request, level, error);
  if (!entry) return json{{"error", error}}.dump();
  const auto &stored = entry->levels[level - 1];
  json reply;
  reply["lb"] = stored.interval.lb;
  reply["ub"] = std::isinf(stored.interval.ub) ? json(nullptr)
                                               : json(stored.interval.ub);
  reply["time_ms"] = stored.time_ms;
  return reply.dump();
}

double ManifestResponder::latency_ms(std::string_view request) const {
  int level = 0;
  std::string error;
  const ManifestEntry *entry = lookup(request, level, error);
  return entry ? entry->levels[level - 1].time_ms : 0.0;
}

EstimatorServer::EstimatorServer(EstimatorManifest manifest, Endpoint bind,
                                 bool real_latency)
    : responder_(std::move(manifest)), real_latency_(real_latency) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error("socket: " + std::string(strerror(errno)));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(bind.port);
  if (::inet_pton(AF_INET, bind.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ConfigError("cannot bind to host '" + bind.host +
                      "' (IPv4 address required)");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) <
          0 ||
      ::listen(listen_fd_, 16) < 0) {
    std::string reason = strerror(errno);
    ::close(listen_fd_);
    throw Error("cannot listen on " + bind.str() + ": " + reason);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr *>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

EstimatorServer::~EstimatorServer() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void EstimatorServer::start() {
  acceptor_ = std::thread([this] { accept_loop(); });
}

void EstimatorServer::serve_forever() { accept_loop(); }

void EstimatorServer::stop() {
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (auto &worker : workers) worker.join();
}

void EstimatorServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, kPollMs);
    if (ready <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(workers_mutex_);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void EstimatorServer::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  while (!stopping_) {
    pollfd pfd{fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, kPollMs);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    ssize_t got = ::recv(fd, chunk, sizeof(chunk), 0);
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));
    std::size_t newline;
    bool ok = true;
    while (ok && (newline = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (real_latency_)
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(
            responder_.latency_ms(line)));
      ok = send_all(fd, responder_.respond(line) + "\n");
      ++served_;
    }
    if (!ok) break;
  }
  ::close(fd);
}

RemoteSource::RemoteSource(Endpoint endpoint, double timeout_s)
    : endpoint_(std::move(endpoint)), timeout_s_(timeout_s) {}

RemoteSource::~RemoteSource() { disconnect(); }

void RemoteSource::disconnect() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  buffer_.clear();
}

void RemoteSource::connect_once() {
  if (fd_ >= 0) return;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo *found = nullptr;
  const std::string port = std::to_string(endpoint_.port);
  if (::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &found) != 0 ||
      !found)
    throw EstimatorUnavailable("cannot resolve " + endpoint_.str());
  int fd = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(found);
    throw EstimatorUnavailable("socket: " + std::string(strerror(errno)));
  }
  timeval tv{};
  tv.tv_sec = static_cast<long>(timeout_s_);
  tv.tv_usec = static_cast<long>((timeout_s_ - std::floor(timeout_s_)) * 1e6);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  int rc = ::connect(fd, found->ai_addr, found->ai_addrlen);
  ::freeaddrinfo(found);
  if (rc < 0) {
    std::string reason = strerror(errno);
    ::close(fd);
    throw EstimatorUnavailable("cannot connect to " + endpoint_.str() + ": " +
                               reason);
  }
  fd_ = fd;
}

std::string RemoteSource::read_line() {
  char chunk[4096];
  while (true) {
    auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }
    ssize_t got = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) {
      disconnect();
      throw EstimatorUnavailable("connection to " + endpoint_.str() +
                                 " closed");
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

Estimate RemoteSource::estimate(const PlanningTask &task, ActionId action,
                                int level) {
  return request(task.actions.at(action).name, level);
}

Estimate RemoteSource::request(const std::string &action, int level) {
  const auto start = std::chrono::steady_clock::now();
  connect_once();
  const std::string line = json{{"action", action}, {"level", level}}.dump();
  if (!send_all(fd_, line + "\n")) {
    disconnect();
    throw EstimatorUnavailable("cannot send to " + endpoint_.str());
  }
  json reply = json::parse(read_line(), nullptr, false);
  const double wall = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  if (reply.is_discarded() || !reply.is_object())
    throw EstimatorUnavailable("protocol error: malformed reply");
  if (auto error = reply.find("error"); error != reply.end())
    throw EstimatorUnavailable(
        "server error: " +
        (error->is_string() ? error->get<std::string>() : error->dump()));
  auto lb = reply.find("lb");
  auto ub = reply.find("ub");
  auto time = reply.find("time_ms");
  if (lb == reply.end() || !lb->is_number() || ub == reply.end() ||
      !(ub->is_number() || ub->is_null()) || time == reply.end() ||
      !time->is_number())
    throw EstimatorUnavailable("protocol error: reply lacks lb/ub/time_ms");
  Estimate estimate;
  const double lower = lb->get<double>();
  const double upper = ub->is_null() ? kInfinity : ub->get<double>();
  if (!(lower >= 0.0 && lower <= upper) || time->get<double>() < 0.0)
    throw EstimatorUnavailable("protocol error: invalid interval");
  estimate.interval = {lower, upper};
  estimate.time_ms = time->get<double>();
  estimate.wall_ms = wall;
  return estimate;
}

} // namespace asec::remote
