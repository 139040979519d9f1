#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "bnsens/api.hpp"
#include "bnsens/model.hpp"

namespace bnsens::service {

/// Transport-independent request; the HTTP binding fills it from the wire.
struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct Options {
  std::chrono::seconds idle_timeout{3600};
  std::chrono::milliseconds deadline{30000};
};

struct Session;

/// In-memory sessions, each holding a network, its evidence and an undo
/// stack. Requests on different sessions never contend; within a session
/// mutations are serialized and reads work on a consistent snapshot.
class Service {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Service(Options options = {});
  ~Service();

  Response handle(const Request& request);

  std::size_t session_count() const;
  /// Drops sessions idle since before `now - idle_timeout`; returns how many.
  std::size_t expire_idle(Clock::time_point now);

 private:
  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<Session> create(BayesianNetwork net, std::string name, std::string& id);
  bool erase(const std::string& id);

  Options options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// HTTP front-end (cpp-httplib) forwarding every request to Service::handle.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bnsens::service
