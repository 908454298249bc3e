// hexaccess command line: build caches, print reports, serve the HTTP API, write fixtures.

#include "hexaccess/city.hpp"
#include "hexaccess/errors.hpp"
#include "hexaccess/export.hpp"
#include "hexaccess/fixture.hpp"
#include "hexaccess/server.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace hexaccess;

namespace {

struct LoadOptions {
  bool use_cache = true;
  bool verbose = true;
};

std::vector<std::unique_ptr<CityBundle>> load_cities(const Config& config, const LoadOptions& opts,
                                                     const std::string& only = {}) {
  std::vector<std::unique_ptr<CityBundle>> out;
  for (const auto& city : config.cities) {
    if (!only.empty() && city.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    auto inputs = load_city_inputs(city, config);
    std::optional<std::vector<Catchment>> cached;
    const auto stamp = input_fingerprint(city, config);
    if (opts.use_cache) cached = read_city_catchments(city.id, config.cache_dir, stamp);
    std::unique_ptr<CityBundle> bundle;
    if (cached) {
      try {
        bundle = build_city(std::move(inputs), config, cached);
      } catch (const DomainError&) {
        // Stale or partial cache: fall back to routing.
        bundle = build_city(load_city_inputs(city, config), config);
        cached.reset();
      }
    } else {
      bundle = build_city(std::move(inputs), config);
    }
    if (opts.verbose) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << city.id << ": " << bundle->demo.cells().size() << " cells, " << bundle->pois.size() << " POIs, "
                << (cached ? "catchments from cache" : "catchments routed") << " in " << secs << " s\n";
    }
    out.push_back(std::move(bundle));
  }
  if (!only.empty() && out.empty()) throw ConfigError("city " + only + " is not configured");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transit accessibility on a hexagonal grid"};
  app.require_subcommand(1);

  std::string config_path;
  int port = -1;
  std::string host;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API and the web UI");
  serve->add_option("--config", config_path, "Run configuration file")->required();
  serve->add_option("--port", port, "Listen port (overrides the config)");
  serve->add_option("--host", host, "Listen address (overrides the config)");

  auto* build = app.add_subcommand("build", "Compute catchments and baseline layers and write the cache");
  build->add_option("--config", config_path, "Run configuration file")->required();
  std::string cache_dir;
  unsigned threads = 0;
  auto* threads_opt = build->add_option("--threads", threads, "Routing worker threads (overrides the config)");
  build->add_option("--cache-dir", cache_dir, "Cache directory (overrides the config)");

  std::string city_id, category, window, dimension;
  auto* report = app.add_subcommand("report", "Print an equity report as JSON");
  report->add_option("--config", config_path, "Run configuration file")->required();
  report->add_option("--city", city_id)->required();
  report->add_option("--category", category)->required();
  report->add_option("--window", window)->required();
  report->add_option("--dimension", dimension)->required();

  std::string out_dir;
  auto* fixture = app.add_subcommand("fixture", "Write the Gridville fixture city");
  fixture->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fixture) {
      write_gridville(out_dir);
      return 0;
    }
    Config config = load_config(config_path);
    if (!cache_dir.empty()) config.cache_dir = cache_dir;
    if (*threads_opt) config.threads = threads;
    if (*build) {
      for (const auto& city : config.cities) {
        const auto stamp = input_fingerprint(city, config);
        auto bundle = load_cities(config, {.use_cache = false}, city.id);
        write_city_cache(*bundle.front(), config.cache_dir, stamp);
        std::cerr << city.id << ": cache written to " << (config.cache_dir / city.id).string() << "\n";
      }
      return 0;
    }
    if (*report) {
      const auto c = parse_category(category);
      if (!c) throw ConfigError("unknown category " + category);
      const auto w = parse_window(window);
      if (!w) throw ConfigError("unknown window " + window);
      const auto d = parse_dimension(dimension);
      if (!d) throw ConfigError("unknown dimension " + dimension);
      auto cities = load_cities(config, {.use_cache = true, .verbose = false}, city_id);
      const auto& base = cities.front()->baseline(*c, *w);
      const auto dims = report_dimensions();
      const auto at = static_cast<std::size_t>(std::find(dims.begin(), dims.end(), *d) - dims.begin());
      std::cout << report_json(base.reports.at(at)).dump(2) << "\n";
      return 0;
    }
    if (*serve) {
      AccessService service(load_cities(config, {}), std::chrono::seconds(config.scenario_idle_s));
      const std::string listen_host = host.empty() ? config.host : host;
      const int listen_port = port >= 0 ? port : config.port;
      std::cerr << "listening on " << listen_host << ":" << listen_port << "\n";
      run_server(service, listen_host, listen_port, config.ui_dir);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NotFoundError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
