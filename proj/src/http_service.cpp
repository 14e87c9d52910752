#include "lighthouse/http_service.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "lighthouse/service.hpp"

namespace lighthouse {

namespace {

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

void error_response(httplib::Response& res, int status, const char* code,
                    const std::string& message) {
  nlohmann::json body;
  body["error"]["code"] = code;
  body["error"]["message"] = message;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

struct EngineTimer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  void stamp(httplib::Response& res) const {
    auto us = std::chrono::duration<double, std::micro>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    res.set_header("X-Engine-Micros", format_decimal(us, 1));
  }
};

}  // namespace

std::string query_result_json(const QueryResult& r) {
  std::string out = "{\"distance_m\":";
  out += format_decimal(r.distance_m, 3);
  out += ",\"nearest\":{\"lat\":";
  out += format_decimal(r.nearest.lat);
  out += ",\"lon\":";
  out += format_decimal(r.nearest.lon);
  out += "},\"class\":\"";
  out += class_name(r.class_label);
  out += "\",\"tile\":{\"lat_floor\":";
  out += std::to_string(r.tile.lat_floor);
  out += ",\"lon_floor\":";
  out += std::to_string(r.tile.lon_floor);
  out += "}}";
  return out;
}

HttpService::HttpService(std::shared_ptr<Engine> engine, size_t max_batch,
                         int threads)
    : engine_(std::move(engine)), max_batch_(max_batch) {
  if (threads > 0) {
    server_.new_task_queue = [threads] {
      return new httplib::ThreadPool(size_t(threads));
    };
  }
  install_routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::install_routes() {
  server_.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"ok\"}", "application/json");
  });

  server_.Get("/v1/stats", [this](const httplib::Request&,
                                  httplib::Response& res) {
    EngineStats s = engine_->stats();
    std::string body = "{\"hits\":" + std::to_string(s.hits) +
                       ",\"misses\":" + std::to_string(s.misses) +
                       ",\"evictions\":" + std::to_string(s.evictions) +
                       ",\"queries\":" + std::to_string(s.queries) +
                       ",\"cached_tiles\":" +
                       std::to_string(engine_->cached_tiles()) + "}";
    res.set_content(body, "application/json");
  });

  server_.Get("/v1/distance", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    if (!req.has_param("lat") || !req.has_param("lon")) {
      error_response(res, 400, "missing_parameter", "lat and lon are required");
      return;
    }
    double lat = 0, lon = 0;
    if (!parse_double(req.get_param_value("lat"), lat) ||
        !parse_double(req.get_param_value("lon"), lon)) {
      error_response(res, 400, "invalid_coordinate",
                     "lat and lon must be finite decimal numbers");
      return;
    }
    EngineTimer timer;
    try {
      QueryResult r = engine_->query(GeoPoint(lat, lon));
      timer.stamp(res);
      res.set_content(query_result_json(r), "application/json");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_argument) {
        error_response(res, 400, "invalid_coordinate", e.what());
      } else {
        error_response(res, 500, error_code_name(e.code()), e.what());
      }
    }
  });

  server_.Post("/v1/distance/batch", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      error_response(res, 400, "bad_json", "request body is not valid JSON");
      return;
    }
    if (!body.contains("points") || !body["points"].is_array()) {
      error_response(res, 400, "bad_request", "body must have a points array");
      return;
    }
    const auto& arr = body["points"];
    if (arr.empty()) {
      error_response(res, 400, "empty_batch", "points array is empty");
      return;
    }
    if (arr.size() > max_batch_) {
      error_response(res, 413, "batch_too_large",
                     "batch exceeds " + std::to_string(max_batch_) + " points");
      return;
    }
    std::vector<GeoPoint> pts;
    pts.reserve(arr.size());
    for (const auto& e : arr) {
      if (!e.is_object() || !e.contains("lat") || !e.contains("lon") ||
          !e["lat"].is_number() || !e["lon"].is_number()) {
        error_response(res, 400, "bad_request",
                       "each point needs numeric lat and lon");
        return;
      }
      try {
        pts.emplace_back(e["lat"].get<double>(), e["lon"].get<double>());
      } catch (const Error& err) {
        error_response(res, 400, "invalid_coordinate", err.what());
        return;
      }
    }
    EngineTimer timer;
    try {
      std::vector<QueryResult> results = engine_->query_batch(pts);
      timer.stamp(res);
      std::string out = "[";
      for (size_t i = 0; i < results.size(); ++i) {
        if (i) out += ',';
        out += query_result_json(results[i]);
      }
      out += ']';
      res.set_content(out, "application/json");
    } catch (const Error& e) {
      error_response(res, 500, error_code_name(e.code()), e.what());
    }
  });

  server_.set_logger([](const httplib::Request& req,
                        const httplib::Response& res) {
    std::string us = res.get_header_value("X-Engine-Micros");
    std::fprintf(stderr, "%s %s %d%s%s\n", req.method.c_str(), req.path.c_str(),
                 res.status, us.empty() ? "" : " engine_us=",
                 us.empty() ? "" : us.c_str());
  });
}

bool HttpService::serve(const std::string& host, int port) {
  return server_.listen(host, port);
}

int HttpService::start(const std::string& host) {
  int port = server_.bind_to_any_port(host);
  if (port <= 0) {
    raise(ErrorCode::io_error, "cannot bind an ephemeral port on " + host);
  }
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return port;
}

void HttpService::stop() {
  if (server_.is_running()) server_.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace lighthouse
