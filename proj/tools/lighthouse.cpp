#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lighthouse/service.hpp"

#include "lighthouse/http_service.hpp"

namespace lh = lighthouse;

namespace {

std::atomic<bool> g_shutdown{false};

void handle_signal(int) { g_shutdown.store(true); }

// key=value tokens for --synthetic: seed, tiles (AxB), grid, origin
// (lat,lon), islands, noise, lakes.
lh::SyntheticWorldSpec parse_synth_spec(const std::vector<std::string>& kvs) {
  lh::SyntheticWorldSpec spec;
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw lh::Error(lh::ErrorCode::invalid_argument,
                      "--synthetic expects key=value, got \"" + kv + "\"");
    }
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    try {
      if (key == "seed") {
        spec.seed = std::stoull(val);
      } else if (key == "grid") {
        spec.grid = std::stoi(val);
      } else if (key == "tiles") {
        auto x = val.find('x');
        if (x == std::string::npos) throw std::invalid_argument(val);
        spec.tiles_lat = std::stoi(val.substr(0, x));
        spec.tiles_lon = std::stoi(val.substr(x + 1));
      } else if (key == "origin") {
        auto c = val.find(',');
        if (c == std::string::npos) throw std::invalid_argument(val);
        spec.lat0 = std::stoi(val.substr(0, c));
        spec.lon0 = std::stoi(val.substr(c + 1));
      } else if (key == "islands") {
        spec.islands = std::stoi(val);
      } else if (key == "noise") {
        spec.noise_amp = std::stod(val);
      } else if (key == "lakes") {
        spec.lake_fraction = std::stod(val);
      } else {
        throw lh::Error(lh::ErrorCode::invalid_argument,
                        "unknown synthetic key \"" + key + "\"");
      }
    } catch (const std::logic_error&) {
      throw lh::Error(lh::ErrorCode::invalid_argument,
                      "bad value for synthetic key \"" + key + "\": " + val);
    }
  }
  return spec;
}

int cmd_query(const std::string& manifest, double lat, double lon,
              size_t cache) {
  lh::GeoPoint q(lat, lon);  // throws invalid_argument on bad coordinates
  lh::Engine engine(manifest, cache);
  lh::QueryResult r = engine.query(q);
  std::cout << "distance_m=" << lh::format_decimal(r.distance_m, 3) << "\n"
            << "nearest_lat=" << lh::format_decimal(r.nearest.lat) << "\n"
            << "nearest_lon=" << lh::format_decimal(r.nearest.lon) << "\n"
            << "class=" << lh::class_name(r.class_label) << "\n"
            << "tile=" << r.tile.name() << "\n";
  return 0;
}

int cmd_serve(const std::string& manifest, const std::string& bind,
              size_t cache, int threads, size_t max_batch) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw lh::Error(lh::ErrorCode::invalid_argument,
                    "--bind must be host:port, got \"" + bind + "\"");
  }
  std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw lh::Error(lh::ErrorCode::invalid_argument,
                    "bad port in --bind: " + bind);
  }

  auto engine = std::make_shared<lh::Engine>(manifest, cache);
  lh::HttpService service(engine, max_batch, threads);

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::thread watcher([&service] {
    while (!g_shutdown.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    std::cerr << "shutting down\n";
    service.stop();
  });

  std::cerr << "serving " << manifest << " on " << host << ":" << port
            << " (cache " << cache << " tiles)\n";
  bool ok = service.serve(host, port);
  g_shutdown.store(true);
  watcher.join();
  if (!ok) {
    std::cerr << "cannot bind " << bind << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lighthouse: distance-to-coast queries from anywhere on earth"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "build a dataset from sources");
  lh::BuildOptions bopt;
  std::vector<std::string> synth_kvs;
  build->add_option("--source", bopt.source_dir,
                    "directory of *.pgm(+*.json sidecar) and *.rings sources")
      ->envname("LIGHTHOUSE_SOURCE");
  build->add_option("--out", bopt.out_dir, "output dataset directory")
      ->required()
      ->envname("LIGHTHOUSE_OUT");
  build->add_option("--grid", bopt.grid, "cells per tile side")
      ->envname("LIGHTHOUSE_GRID");
  build->add_option("--max-gap", bopt.max_gap_m,
                    "down-sampling gap threshold, meters");
  build->add_option("--leaf-size", bopt.leaf_size, "ball tree leaf size");
  build->add_option("--chunk-size", bopt.chunk_size, "raster chunk side");
  build->add_option("--threads", bopt.threads, "worker threads (0 = auto)");
  build->add_option("--synthetic", synth_kvs,
                    "synthetic world spec: seed=7 tiles=5x5 grid=512 ...")
      ->expected(0, -1);

  // query
  auto* query = app.add_subcommand("query", "one distance-to-coast lookup");
  std::string manifest;
  double lat = 0, lon = 0;
  size_t cache = 64;
  query->add_option("--manifest", manifest, "path to lighthouse.manifest")
      ->required()
      ->envname("LIGHTHOUSE_MANIFEST");
  query->add_option("--lat", lat, "latitude, degrees")->required();
  query->add_option("--lon", lon, "longitude, degrees")->required();
  query->add_option("--cache", cache, "tile cache capacity")
      ->envname("LIGHTHOUSE_CACHE");

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP query service");
  std::string bind = "127.0.0.1:8080";
  int threads = 0;
  size_t max_batch = lh::kDefaultMaxBatch;
  serve->add_option("--manifest", manifest, "path to lighthouse.manifest")
      ->required()
      ->envname("LIGHTHOUSE_MANIFEST");
  serve->add_option("--bind", bind, "host:port")->envname("LIGHTHOUSE_BIND");
  serve->add_option("--cache", cache, "tile cache capacity")
      ->envname("LIGHTHOUSE_CACHE");
  serve->add_option("--threads", threads, "handler threads (0 = library default)");
  serve->add_option("--max-batch", max_batch, "batch size cap");

  // bench
  auto* bench = app.add_subcommand("bench", "latency benchmark");
  lh::BenchOptions benopt;
  bench->add_option("--manifest", manifest, "path to lighthouse.manifest")
      ->required()
      ->envname("LIGHTHOUSE_MANIFEST");
  bench->add_option("--queries", benopt.queries, "workload size");
  bench->add_option("--seed", benopt.seed, "workload seed");
  bench->add_option("--mode", benopt.mode, "uniform | coastal")
      ->check(CLI::IsMember({"uniform", "coastal"}));
  bench->add_option("--batch-sizes", benopt.batch_sizes,
                    "batch sweep sizes, e.g. 1 10 100 1000");
  bench->add_option("--cache", benopt.cache_capacity, "tile cache capacity")
      ->envname("LIGHTHOUSE_CACHE");
  bench->add_option("--report-dir", benopt.out_dir,
                    "write latencies.csv and latency_hist.svg here");

  // audit
  auto* audit = app.add_subcommand("audit", "engine-vs-oracle dataset audit");
  lh::AuditOptions aopt;
  audit->add_option("--manifest", manifest, "path to lighthouse.manifest")
      ->required()
      ->envname("LIGHTHOUSE_MANIFEST");
  audit->add_option("--points", aopt.points, "random query count");
  audit->add_option("--seed", aopt.seed, "sampling seed");
  audit->add_option("--cache", aopt.cache_capacity, "tile cache capacity")
      ->envname("LIGHTHOUSE_CACHE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed()) {
      if (!synth_kvs.empty() || build->count("--synthetic")) {
        bopt.synthetic = true;
        bopt.synth = parse_synth_spec(synth_kvs);
      }
      if (!bopt.synthetic && bopt.source_dir.empty()) {
        std::cerr << "error: build needs --source or --synthetic\n";
        return 2;
      }
      lh::run_build(bopt, std::cout);
      return 0;
    }
    if (query->parsed()) return cmd_query(manifest, lat, lon, cache);
    if (serve->parsed())
      return cmd_serve(manifest, bind, cache, threads, max_batch);
    if (bench->parsed()) {
      lh::run_bench(manifest, benopt, std::cout);
      return 0;
    }
    if (audit->parsed()) return lh::run_audit(manifest, aopt, std::cout);
  } catch (const lh::Error& e) {
    std::cerr << "error [" << lh::error_code_name(e.code()) << "]: " << e.what()
              << "\n";
    switch (e.code()) {
      case lh::ErrorCode::invalid_argument:
      case lh::ErrorCode::invalid_capacity:
      case lh::ErrorCode::out_of_range:
      case lh::ErrorCode::missing_file:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
