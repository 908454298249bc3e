#pragma once

#include "hexaccess/city.hpp"
#include "hexaccess/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace hexaccess {

/// In-memory scenarios keyed by id. Each scenario accepts one writer at a time; a second concurrent
/// writer gets ConflictError instead of waiting. Scenarios idle longer than the TTL are dropped.
class ScenarioStore {
 public:
  explicit ScenarioStore(std::chrono::seconds idle_ttl = std::chrono::hours(1));

  /// Stores the scenario under a fresh id and returns it.
  Scenario create(Scenario scenario);
  /// Throws NotFoundError.
  Scenario get(const std::string& id);
  /// Runs `edit` on a copy and commits it when it returns without throwing.
  Scenario mutate(const std::string& id, const std::function<void(Scenario&)>& edit);
  bool erase(const std::string& id);
  std::size_t size() const;

 private:
  struct Slot {
    std::mutex writer;
    std::mutex data;
    Scenario scenario;
    std::chrono::steady_clock::time_point last_used;
  };

  std::shared_ptr<Slot> find(const std::string& id);
  void evict(std::chrono::steady_clock::time_point now);

  std::chrono::seconds ttl_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::mt19937_64 rng_;
  std::uint64_t counter_ = 0;
};

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  /// Large cached payloads are shared instead of copied into `body`.
  std::shared_ptr<const std::string> shared_body;

  const std::string& text() const { return shared_body ? *shared_body : body; }
};

/// The HTTP API over a set of loaded cities. Request handling is thread-safe.
class AccessService {
 public:
  AccessService(std::vector<std::unique_ptr<CityBundle>> cities, std::chrono::seconds scenario_ttl = std::chrono::hours(1));

  /// Dispatches one request; used by the HTTP binding and directly by tests.
  HttpResult handle(const std::string& method, const std::string& path,
                    const std::multimap<std::string, std::string>& query, const std::string& body);

  /// Registers every /api route (and an optional static directory) on an httplib server.
  void mount(httplib::Server& server, const std::optional<std::filesystem::path>& static_dir = std::nullopt);

  const CityBundle& city(const std::string& id) const;
  ScenarioStore& scenarios() noexcept { return scenarios_; }

 private:
  using Query = std::multimap<std::string, std::string>;

  HttpResult cities() const;
  HttpResult layer(const Query& q);
  HttpResult pois(const Query& q);
  HttpResult poi_isochrone(const std::string& poi_id, const Query& q);
  HttpResult isochrone_preview(const Query& q);
  HttpResult report(const Query& q);
  HttpResult summary(const Query& q);
  HttpResult create_scenario(const std::string& body);
  HttpResult get_scenario(const std::string& id);
  HttpResult delete_scenario(const std::string& id);
  HttpResult add_poi(const std::string& id, const std::string& body);
  HttpResult remove_poi(const std::string& id, const std::string& poi_id);
  HttpResult scenario_result(const std::string& id, const Query& q);

  std::vector<std::unique_ptr<CityBundle>> cities_;
  ScenarioStore scenarios_;
  std::mutex layer_cache_mutex_;
  std::map<std::string, std::shared_ptr<const std::string>> layer_cache_;
};

/// Blocks serving the API on host:port until the process is stopped.
void run_server(AccessService& service, const std::string& host, int port,
                const std::optional<std::filesystem::path>& static_dir);

}  // namespace hexaccess
