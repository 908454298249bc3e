#include "hexaccess/config.hpp"

#include "hexaccess/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hexaccess {

namespace {

using nlohmann::json;

Seconds parse_clock(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be an \"HH:MM\" string");
  std::string text = v.get<std::string>();
  if (text.size() == 5) text += ":00";
  auto t = parse_gtfs_time(text);
  if (!t) throw ConfigError(what + " is not a valid time: " + v.get<std::string>());
  return *t;
}

template <typename T>
T get(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<std::string> names(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a non-empty array of names");
  std::vector<std::string> out;
  for (const auto& n : v) {
    if (!n.is_string()) throw ConfigError(what + " must contain strings");
    out.push_back(n.get<std::string>());
  }
  return out;
}

}  // namespace

Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  Config cfg;
  if (doc.contains("listen")) {
    const auto& l = doc["listen"];
    cfg.host = get<std::string>(l, "host", cfg.host, "listen");
    cfg.port = get<int>(l, "port", cfg.port, "listen");
    if (cfg.port < 0 || cfg.port > 65535) throw ConfigError("listen.port out of range");
  }
  cfg.cache_dir = resolve(base_dir, get<std::string>(doc, "cache_dir", "cache", "config"));
  if (doc.contains("ui_dir")) cfg.ui_dir = resolve(base_dir, get<std::string>(doc, "ui_dir", "", "config"));
  if (doc.contains("service_weekday")) {
    auto d = parse_weekday(get<std::string>(doc, "service_weekday", "", "config"));
    if (!d) throw ConfigError("service_weekday must be a lowercase weekday name");
    cfg.weekday = *d;
  }
  cfg.routing.weekday = cfg.weekday;

  if (doc.contains("windows")) {
    const auto& w = doc["windows"];
    if (!w.is_object() || w.empty()) throw ConfigError("windows must be an object keyed by window label");
    cfg.windows.clear();
    for (const auto& [label, span] : w.items()) {
      auto wl = parse_window(label);
      if (!wl) throw ConfigError("unknown window label " + label);
      if (!span.is_array() || span.size() != 2) throw ConfigError("window " + label + " needs [start, end]");
      TimeWindow tw{*wl, parse_clock(span[0], "windows." + label), parse_clock(span[1], "windows." + label)};
      if (tw.start >= tw.end) throw ConfigError("window " + label + " must start before it ends");
      cfg.windows.push_back(tw);
    }
    std::sort(cfg.windows.begin(), cfg.windows.end(), [](auto& a, auto& b) { return a.label < b.label; });
  }

  if (doc.contains("routing")) {
    const auto& r = doc["routing"];
    cfg.routing.walk_speed_mps = get<double>(r, "walk_speed_mps", cfg.routing.walk_speed_mps, "routing");
    cfg.routing.max_walk_m = get<double>(r, "max_walk_m", cfg.routing.max_walk_m, "routing");
    cfg.routing.transfer_slack_s = get<int>(r, "transfer_slack_s", cfg.routing.transfer_slack_s, "routing");
    cfg.routing.max_transfers = get<int>(r, "max_transfers", cfg.routing.max_transfers, "routing");
    cfg.budget_s = get<int>(r, "budget_s", cfg.budget_s, "routing");
    cfg.sample_interval_s = get<int>(r, "sample_interval_s", cfg.sample_interval_s, "routing");
    if (!(cfg.routing.walk_speed_mps > 0) || cfg.routing.max_walk_m < 0 || cfg.routing.transfer_slack_s < 0 ||
        cfg.routing.max_transfers < 0 || cfg.budget_s <= 0 || cfg.sample_interval_s <= 0) {
      throw ConfigError("routing parameters out of range");
    }
  }

  if (doc.contains("brackets")) {
    const auto& b = doc["brackets"];
    DemographicSchema defaults;
    auto dim = [&](Dimension d) {
      const auto key = std::string(to_string(d));
      return b.contains(key) ? names(b[key], "brackets." + key) : defaults.brackets(d);
    };
    cfg.schema = DemographicSchema(dim(Dimension::race), dim(Dimension::age_sex), dim(Dimension::income),
                                   dim(Dimension::vehicle));
  }
  cfg.scenario_idle_s = get<int>(doc, "scenario_idle_s", cfg.scenario_idle_s, "config");
  cfg.threads = get<unsigned>(doc, "threads", cfg.threads, "config");

  if (!doc.contains("cities") || !doc["cities"].is_array()) throw ConfigError("config needs a cities array");
  std::set<std::string> ids;
  for (const auto& c : doc["cities"]) {
    CityConfig city;
    const std::string where = "cities[" + std::to_string(cfg.cities.size()) + "]";
    auto need = [&](const char* key) {
      if (!c.contains(key) || !c[key].is_string()) throw ConfigError(where + "." + key + " is required");
      return c[key].get<std::string>();
    };
    city.id = need("id");
    if (!ids.insert(city.id).second) throw ConfigError("duplicate city id " + city.id);
    city.name = get<std::string>(c, "name", city.id, where);
    if (!c.contains("anchor")) throw ConfigError(where + ".anchor is required");
    city.anchor = {get<double>(c["anchor"], "lat", 0.0, where + ".anchor"),
                   get<double>(c["anchor"], "lon", 0.0, where + ".anchor")};
    try {
      validate(city.anchor);
    } catch (const DomainError& e) {
      throw ConfigError(where + ".anchor: " + e.what());
    }
    city.edge_m = get<double>(c, "edge_m", city.edge_m, where);
    if (!(city.edge_m > 0)) throw ConfigError(where + ".edge_m must be positive");
    if (c.contains("bbox")) {
      const auto& b = c["bbox"];
      city.bbox = GeoBox{get<double>(b, "min_lat", 0, where), get<double>(b, "min_lon", 0, where),
                         get<double>(b, "max_lat", 0, where), get<double>(b, "max_lon", 0, where)};
      if (city.bbox->min_lat >= city.bbox->max_lat || city.bbox->min_lon >= city.bbox->max_lon) {
        throw ConfigError(where + ".bbox is empty");
      }
    }
    city.gtfs = resolve(base_dir, need("gtfs"));
    city.pois = resolve(base_dir, need("pois"));
    city.census_geometry = resolve(base_dir, need("census_geometry"));
    city.census_demographics = resolve(base_dir, need("census_demographics"));
    cfg.cities.push_back(std::move(city));
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace hexaccess
