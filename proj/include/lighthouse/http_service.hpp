#pragma once

#include <memory>
#include <string>
#include <thread>

// engine.hpp (and Eigen underneath) must come before httplib: glibc's
// resolv.h, which httplib drags in, defines a `_res` macro that clashes
// with Eigen parameter names.
#include "lighthouse/engine.hpp"

#include <httplib.h>

namespace lighthouse {

inline constexpr size_t kDefaultMaxBatch = 10000;

// HTTP surface over one shared Engine:
//   GET  /v1/distance?lat=&lon=
//   POST /v1/distance/batch   {"points": [{"lat":..,"lon":..}, ...]}
//   GET  /v1/healthz
//   GET  /v1/stats
// Engine time is returned in the X-Engine-Micros header. Malformed input is
// a 400 with a machine-readable error code; oversized batches are 413.
class HttpService {
 public:
  HttpService(std::shared_ptr<Engine> engine,
              size_t max_batch = kDefaultMaxBatch, int threads = 0);
  ~HttpService();

  // Blocking serve for the CLI; false if the address cannot be bound.
  bool serve(const std::string& host, int port);

  // Binds an ephemeral port and serves on a background thread; returns the
  // port. Used by tests and local tooling.
  int start(const std::string& host);

  void stop();

  httplib::Server& server() { return server_; }

 private:
  void install_routes();

  std::shared_ptr<Engine> engine_;
  size_t max_batch_;
  httplib::Server server_;
  std::thread thread_;
};

std::string query_result_json(const QueryResult& r);

}  // namespace lighthouse
