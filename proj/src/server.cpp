#include "hexaccess/server.hpp"

#include "hexaccess/csv.hpp"
#include "hexaccess/errors.hpp"
#include "hexaccess/export.hpp"

#include <httplib.h>
#include <json.hpp>

#include <regex>

namespace hexaccess {

using nlohmann::json;

// ---- scenario store ------------------------------------------------------------------------

ScenarioStore::ScenarioStore(std::chrono::seconds idle_ttl) : ttl_(idle_ttl), rng_(std::random_device{}()) {}

void ScenarioStore::evict(std::chrono::steady_clock::time_point now) {
  std::erase_if(slots_, [&](const auto& entry) {
    std::unique_lock writer(entry.second->writer, std::try_to_lock);
    return writer.owns_lock() && now - entry.second->last_used > ttl_;
  });
}

Scenario ScenarioStore::create(Scenario scenario) {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  evict(now);
  char buf[40];
  std::snprintf(buf, sizeof buf, "sc-%012llx-%llu", static_cast<unsigned long long>(rng_() & 0xffffffffffffULL),
                static_cast<unsigned long long>(++counter_));
  scenario.id = buf;
  scenario.created_at =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
  auto slot = std::make_shared<Slot>();
  slot->scenario = scenario;
  slot->last_used = now;
  slots_.emplace(scenario.id, std::move(slot));
  return scenario;
}

std::shared_ptr<ScenarioStore::Slot> ScenarioStore::find(const std::string& id) {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  evict(now);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw NotFoundError("unknown_scenario", "no scenario " + id);
  it->second->last_used = now;
  return it->second;
}

Scenario ScenarioStore::get(const std::string& id) {
  auto slot = find(id);
  std::lock_guard data(slot->data);
  return slot->scenario;
}

Scenario ScenarioStore::mutate(const std::string& id, const std::function<void(Scenario&)>& edit) {
  auto slot = find(id);
  std::unique_lock writer(slot->writer, std::try_to_lock);
  if (!writer.owns_lock()) throw ConflictError("scenario " + id + " is being modified by another request");
  Scenario copy;
  {
    std::lock_guard data(slot->data);
    copy = slot->scenario;
  }
  edit(copy);
  std::lock_guard data(slot->data);
  slot->scenario = copy;
  return copy;
}

bool ScenarioStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  return slots_.erase(id) > 0;
}

std::size_t ScenarioStore::size() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

// ---- service ---------------------------------------------------------------------------------

namespace {

HttpResult ok(const json& j, int status = 200) { return {status, j.dump(), "application/json", nullptr}; }

HttpResult error(int status, const std::string& code, const std::string& message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json", nullptr};
}

std::optional<std::string> param(const std::multimap<std::string, std::string>& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

struct MissingParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string require(const std::multimap<std::string, std::string>& q, const std::string& key) {
  auto v = param(q, key);
  if (!v || v->empty()) throw MissingParameter("missing query parameter '" + key + "'");
  return *v;
}

PoiCategory category_param(const std::string& text) {
  auto c = parse_category(text);
  if (!c) throw NotFoundError("unknown_category", "unknown POI category " + text);
  return *c;
}

WindowLabel window_param(const std::string& text) {
  auto w = parse_window(text);
  if (!w) throw NotFoundError("unknown_window", "unknown time window " + text);
  return *w;
}

std::optional<Dimension> dimension_param(const std::optional<std::string>& text) {
  if (!text || text->empty()) return std::nullopt;
  auto d = parse_dimension(*text);
  if (!d) throw NotFoundError("unknown_dimension", "unknown demographic dimension " + *text);
  return d;
}

json window_json(const TimeWindow& w) {
  return {{"label", to_string(w.label)}, {"start", format_gtfs_time(w.start)}, {"end", format_gtfs_time(w.end)}};
}

}  // namespace

AccessService::AccessService(std::vector<std::unique_ptr<CityBundle>> cities, std::chrono::seconds scenario_ttl)
    : cities_(std::move(cities)), scenarios_(scenario_ttl) {
  std::sort(cities_.begin(), cities_.end(), [](const auto& a, const auto& b) { return a->id < b->id; });
}

const CityBundle& AccessService::city(const std::string& id) const {
  for (const auto& c : cities_) {
    if (c->id == id) return *c;
  }
  throw NotFoundError("unknown_city", "unknown city " + id);
}

HttpResult AccessService::handle(const std::string& method, const std::string& path, const Query& query,
                           const std::string& body) {
  static const std::regex kPoiIsochrone(R"(^/api/poi/([^/]+)/isochrone$)");
  static const std::regex kScenario(R"(^/api/scenario/([^/]+)$)");
  static const std::regex kScenarioPoi(R"(^/api/scenario/([^/]+)/poi$)");
  static const std::regex kScenarioPoiId(R"(^/api/scenario/([^/]+)/poi/([^/]+)$)");
  static const std::regex kScenarioResult(R"(^/api/scenario/([^/]+)/result$)");
  std::smatch m;
  try {
    if (method == "GET") {
      if (path == "/api/cities") return cities();
      if (path == "/api/layer") return layer(query);
      if (path == "/api/pois") return pois(query);
      if (path == "/api/isochrone") return isochrone_preview(query);
      if (path == "/api/report") return report(query);
      if (path == "/api/summary") return summary(query);
      if (std::regex_match(path, m, kPoiIsochrone)) return poi_isochrone(m[1], query);
      if (std::regex_match(path, m, kScenarioResult)) return scenario_result(m[1], query);
      if (std::regex_match(path, m, kScenario)) return get_scenario(m[1]);
    } else if (method == "POST") {
      if (path == "/api/scenario") return create_scenario(body);
      if (std::regex_match(path, m, kScenarioPoi)) return add_poi(m[1], body);
    } else if (method == "DELETE") {
      if (std::regex_match(path, m, kScenarioPoiId)) return remove_poi(m[1], m[2]);
      if (std::regex_match(path, m, kScenario)) return delete_scenario(m[1]);
    }
    return error(404, "unknown_route", method + " " + path + " is not an API route");
  } catch (const MissingParameter& e) {
    return error(400, "missing_parameter", e.what());
  } catch (const NotFoundError& e) {
    return error(404, e.code(), e.what());
  } catch (const ConflictError& e) {
    return error(409, "conflict", e.what());
  } catch (const InvalidRequestError& e) {
    return error(422, "invalid_request", e.what());
  } catch (const DomainError& e) {
    return error(422, "invalid_request", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

HttpResult AccessService::cities() const {
  json out = json::array();
  for (const auto& c : cities_) {
    json categories = json::array();
    for (auto cat : c->categories()) categories.push_back(to_string(cat));
    json windows = json::array();
    for (const auto& w : c->windows) windows.push_back(window_json(w));
    const auto center = c->grid.anchor();
    out.push_back({{"id", c->id},
                   {"name", c->name},
                   {"center", {{"lat", center.lat}, {"lon", center.lon}}},
                   {"extent",
                    {{"min_lat", c->extent.min_lat},
                     {"min_lon", c->extent.min_lon},
                     {"max_lat", c->extent.max_lat},
                     {"max_lon", c->extent.max_lon}}},
                   {"categories", std::move(categories)},
                   {"windows", std::move(windows)}});
  }
  return ok(out);
}

HttpResult AccessService::layer(const Query& q) {
  const auto& c = city(require(q, "city"));
  const auto category = category_param(require(q, "category"));
  const auto window = window_param(require(q, "window"));
  const auto dimension = dimension_param(param(q, "dimension"));
  const auto& base = c.baseline(category, window);
  const std::string key = c.id + "|" + std::string(to_string(category)) + "|" + std::string(to_string(window)) + "|" +
                          (dimension ? std::string(to_string(*dimension)) : "");
  std::shared_ptr<const std::string> cached;
  {
    std::lock_guard lock(layer_cache_mutex_);
    auto it = layer_cache_.find(key);
    if (it != layer_cache_.end()) cached = it->second;
  }
  if (!cached) {
    auto built = std::make_shared<const std::string>(layer_geojson(base.layer, c.grid, c.demo, dimension));
    std::lock_guard lock(layer_cache_mutex_);
    cached = layer_cache_.emplace(key, std::move(built)).first->second;
  }
  return {200, {}, "application/geo+json", cached};
}

HttpResult AccessService::pois(const Query& q) {
  const auto& c = city(require(q, "city"));
  const auto category = param(q, "category");
  std::optional<PoiCategory> cat;
  if (category && !category->empty()) cat = category_param(*category);
  std::vector<Poi> out;
  std::set<std::string> removed;
  if (auto sid = param(q, "scenario"); sid && !sid->empty()) {
    auto scenario = scenarios_.get(*sid);
    if (scenario.city != c.id) throw NotFoundError("unknown_scenario", "scenario belongs to another city");
    removed = scenario.removed;
    for (const auto& p : scenario.added) {
      if (!cat || p.category == *cat) out.push_back(p);
    }
  }
  for (const auto& p : c.pois) {
    if ((!cat || p.category == *cat) && !removed.count(p.id)) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const Poi& a, const Poi& b) { return a.id < b.id; });
  return {200, pois_geojson(out).dump(), "application/geo+json", nullptr};
}

HttpResult AccessService::poi_isochrone(const std::string& poi_id, const Query& q) {
  const auto window = window_param(require(q, "window"));
  const auto city_id = param(q, "city");
  if (auto sid = param(q, "scenario"); sid && !sid->empty()) {
    const auto scenario = scenarios_.get(*sid);
    for (const auto& p : scenario.added) {
      if (p.id == poi_id) {
        const auto& c = city(scenario.city);
        const auto& w = c.window(window);
        return {200, catchment_geojson(compute_catchment(*c.router, p, w, c.budget_s, c.sample_interval_s), c.grid).dump(),
                "application/geo+json", nullptr};
      }
    }
  }
  for (const auto& c : cities_) {
    if (city_id && !city_id->empty() && c->id != *city_id) continue;
    if (const Poi* p = c->poi(poi_id)) {
      const auto& base = c->baseline(p->category, window);
      const Catchment* catchment = base.catchment(poi_id);
      if (!catchment) break;
      return {200, catchment_geojson(*catchment, c->grid).dump(), "application/geo+json", nullptr};
    }
  }
  throw NotFoundError("unknown_poi", "unknown POI " + poi_id);
}

HttpResult AccessService::isochrone_preview(const Query& q) {
  const auto& c = city(require(q, "city"));
  const auto window = window_param(require(q, "window"));
  auto lat = parse_double(require(q, "lat"));
  auto lon = parse_double(require(q, "lon"));
  if (!lat || !lon) throw InvalidRequestError("lat/lon must be numbers");
  Poi anonymous;
  anonymous.id = "preview";
  anonymous.location = GeoPoint{*lat, *lon};
  validate(anonymous.location);
  if (!c.extent.contains(anonymous.location)) throw InvalidRequestError("location lies outside the city");
  const auto& w = c.window(window);
  return {200, catchment_geojson(compute_catchment(*c.router, anonymous, w, c.budget_s, c.sample_interval_s), c.grid).dump(),
          "application/geo+json", nullptr};
}

HttpResult AccessService::report(const Query& q) {
  const auto& c = city(require(q, "city"));
  const auto category = category_param(require(q, "category"));
  const auto window = window_param(require(q, "window"));
  const auto dimension = dimension_param(require(q, "dimension"));
  const auto& base = c.baseline(category, window);
  const auto dims = report_dimensions();
  const auto at = std::find(dims.begin(), dims.end(), *dimension) - dims.begin();
  return ok(report_json(base.reports[static_cast<std::size_t>(at)]));
}

HttpResult AccessService::summary(const Query& q) {
  const auto& c = city(require(q, "city"));
  const auto window = window_param(require(q, "window"));
  std::vector<AccessibilityLayer> layers;
  for (auto cat : kPoiCategories) layers.push_back(c.baseline(cat, window).layer);
  json out = json::array();
  for (const auto& s : city_summary(layers, c.demo)) {
    out.push_back({{"category", to_string(s.category)}, {"score", s.score ? json(*s.score) : json(nullptr)}});
  }
  return ok(out);
}

HttpResult AccessService::create_scenario(const std::string& body) {
  json j;
  try {
    j = body.empty() ? json::object() : json::parse(body);
  } catch (const json::parse_error& e) {
    throw InvalidRequestError(std::string("body is not JSON: ") + e.what());
  }
  Scenario s = scenario_from_json(j);
  const auto& c = city(s.city);
  try {
    validate_scenario(s, c.context());
  } catch (const DomainError& e) {
    throw InvalidRequestError(e.what());
  }
  return ok(scenario_json(scenarios_.create(std::move(s))), 201);
}

HttpResult AccessService::get_scenario(const std::string& id) { return ok(scenario_json(scenarios_.get(id))); }

HttpResult AccessService::delete_scenario(const std::string& id) {
  if (!scenarios_.erase(id)) throw NotFoundError("unknown_scenario", "no scenario " + id);
  return ok(json{{"deleted", id}});
}

HttpResult AccessService::add_poi(const std::string& id, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw InvalidRequestError(std::string("body is not JSON: ") + e.what());
  }
  Poi poi = poi_from_json(j, PoiOrigin::scenario);
  scenarios_.mutate(id, [&](Scenario& s) {
    const auto& c = city(s.city);
    if (poi.id.empty()) {
      for (std::size_t n = s.added.size() + 1;; ++n) {
        poi.id = "new-" + std::to_string(n);
        const bool taken = c.poi(poi.id) || std::any_of(s.added.begin(), s.added.end(),
                                                          [&](const Poi& p) { return p.id == poi.id; });
        if (!taken) break;
      }
    }
    if (poi.name.empty()) poi.name = poi.id;
    s.added.push_back(poi);
    try {
      validate_scenario(s, c.context());
    } catch (const DomainError& e) {
      throw InvalidRequestError(e.what());
    }
  });
  return ok(poi_json(poi), 201);
}

HttpResult AccessService::remove_poi(const std::string& id, const std::string& poi_id) {
  const Scenario updated = scenarios_.mutate(id, [&](Scenario& s) {
    auto added = std::find_if(s.added.begin(), s.added.end(), [&](const Poi& p) { return p.id == poi_id; });
    if (added != s.added.end()) {
      s.added.erase(added);
      return;
    }
    if (!city(s.city).poi(poi_id)) throw NotFoundError("unknown_poi", "no POI " + poi_id + " in scenario or baseline");
    s.removed.insert(poi_id);
  });
  return ok(scenario_json(updated));
}

HttpResult AccessService::scenario_result(const std::string& id, const Query& q) {
  const Scenario s = scenarios_.get(id);
  const auto& c = city(s.city);
  const auto category = category_param(require(q, "category"));
  const auto window = window_param(require(q, "window"));
  const auto dimension = dimension_param(param(q, "dimension"));
  const auto& base = c.baseline(category, window);
  const auto result = apply_scenario(base, s, c.context());
  return ok(scenario_result_json(s, result, c.grid, c.demo, dimension));
}

void AccessService::mount(httplib::Server& server, const std::optional<std::filesystem::path>& static_dir) {
  auto bind = [this](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    auto result = handle(req.method, req.path, query, req.body);
    res.status = result.status;
    if (auto shared = result.shared_body) {
      res.set_content_provider(shared->size(), result.content_type,
                               [shared](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                                 return sink.write(shared->data() + offset, std::min(length, shared->size() - offset));
                               });
    } else {
      res.set_content(std::move(result.body), result.content_type);
    }
  };
  server.Get(R"(/api/.*)", bind);
  server.Post(R"(/api/.*)", bind);
  server.Delete(R"(/api/.*)", bind);
  if (static_dir && std::filesystem::is_directory(*static_dir)) server.set_mount_point("/", static_dir->string());
}

void run_server(AccessService& service, const std::string& host, int port,
                const std::optional<std::filesystem::path>& static_dir) {
  httplib::Server server;
  service.mount(server, static_dir);
  if (!server.listen(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace hexaccess
