#pragma once

#include "hexaccess/demographics.hpp"
#include "hexaccess/geo.hpp"
#include "hexaccess/routing.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hexaccess {

struct CityConfig {
  std::string id;
  std::string name;
  GeoPoint anchor;
  double edge_m = kDefaultEdgeM;
  std::optional<GeoBox> bbox;  // defaults to the census geometry's bounds
  std::filesystem::path gtfs;
  std::filesystem::path pois;
  std::filesystem::path census_geometry;
  std::filesystem::path census_demographics;
};

/// Run-level configuration. Relative paths are resolved against the config file's directory.
///
/// {
///   "listen": {"host": "127.0.0.1", "port": 8080},
///   "cache_dir": "cache", "ui_dir": "webui/dist",
///   "service_weekday": "wednesday",
///   "windows": {"morning": ["07:00", "09:00"], ...},
///   "routing": {"walk_speed_mps": 1.4, "max_walk_m": 800, "transfer_slack_s": 60,
///               "max_transfers": 3, "budget_s": 1800, "sample_interval_s": 1800},
///   "brackets": {"race": [...], "age_sex": [...], "income": [...], "vehicle": [...]},
///   "scenario_idle_s": 3600, "threads": 0,
///   "cities": [{"id": ..., "name": ..., "anchor": {"lat": ..., "lon": ...}, "edge_m": 196.2,
///               "bbox": {"min_lat": ..., "min_lon": ..., "max_lat": ..., "max_lon": ...},
///               "gtfs": dir, "pois": csv, "census_geometry": geojson, "census_demographics": csv}]
/// }
struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path cache_dir = "cache";
  std::optional<std::filesystem::path> ui_dir;
  Weekday weekday = Weekday::wednesday;
  std::vector<TimeWindow> windows = {default_window(WindowLabel::morning), default_window(WindowLabel::afternoon),
                                     default_window(WindowLabel::evening)};
  RouterParams routing;
  Seconds budget_s = kDefaultBudget;
  Seconds sample_interval_s = kDefaultSampleInterval;
  DemographicSchema schema;
  Seconds scenario_idle_s = 3600;
  unsigned threads = 0;
  std::vector<CityConfig> cities;
};

/// Throws ConfigError for unreadable files, unknown keys' bad values or missing city fields.
Config load_config(const std::filesystem::path& path);
Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir);

}  // namespace hexaccess
