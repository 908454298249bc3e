#include "hexaccess/city.hpp"

#include "hexaccess/census.hpp"
#include "hexaccess/errors.hpp"
#include "hexaccess/export.hpp"

#include <algorithm>
#include <fstream>

namespace hexaccess {

CellFilter CityBundle::keep() const {
  return [grid = grid, extent = extent](const HexCellId& cell) { return extent.contains(cell_center(grid, cell)); };
}

ScenarioContext CityBundle::context() const { return {*router, demo, pois, extent, keep()}; }

const TimeWindow& CityBundle::window(WindowLabel label) const {
  for (const auto& w : windows) {
    if (w.label == label) return w;
  }
  throw NotFoundError("unknown_window", "window " + std::string(to_string(label)) + " is not configured");
}

const BaselineState& CityBundle::baseline(PoiCategory category, WindowLabel window) const {
  auto it = baselines.find({category, window});
  if (it == baselines.end()) {
    throw NotFoundError("unknown_layer", "no layer for " + std::string(to_string(category)) + "/" +
                                             std::string(to_string(window)) + " in " + id);
  }
  return it->second;
}

const Poi* CityBundle::poi(std::string_view poi_id) const {
  auto it = std::lower_bound(pois.begin(), pois.end(), poi_id, [](const Poi& p, std::string_view v) { return p.id < v; });
  if (it == pois.end() || it->id != poi_id) return nullptr;
  return &*it;
}

std::vector<PoiCategory> CityBundle::categories() const {
  std::vector<PoiCategory> out(kPoiCategories.begin(), kPoiCategories.end());
  return out;
}

CityInputs load_city_inputs(const CityConfig& city, const Config& config) {
  CityInputs in{city, HexGrid(city.anchor, city.edge_m), {}, {}, {}, {}};
  auto units = parse_census(city.census_geometry, city.census_demographics, config.schema);
  if (units.empty()) throw DataError("city " + city.id + " has no census units");
  if (city.bbox) {
    in.extent = *city.bbox;
  } else {
    GeoBox box{90, 180, -90, -180};
    for (const auto& u : units) {
      for (const auto& p : u.boundary.exterior) {
        box.min_lat = std::min(box.min_lat, p.lat);
        box.max_lat = std::max(box.max_lat, p.lat);
        box.min_lon = std::min(box.min_lon, p.lon);
        box.max_lon = std::max(box.max_lon, p.lon);
      }
    }
    in.extent = box;
  }
  try {
    in.demo = allocate_demographics(units, in.grid, config.schema);
  } catch (const DomainError& e) {
    throw DataError("city " + city.id + ": " + e.what());
  }
  in.pois = parse_pois(city.pois);
  std::sort(in.pois.begin(), in.pois.end(), [](const Poi& a, const Poi& b) { return a.id < b.id; });
  in.network = parse_gtfs(city.gtfs);
  return in;
}

std::unique_ptr<CityBundle> build_city(CityInputs inputs, const Config& config,
                                       const std::optional<std::vector<Catchment>>& catchments) {
  auto city = std::make_unique<CityBundle>();
  city->id = inputs.config.id;
  city->name = inputs.config.name;
  city->grid = inputs.grid;
  city->extent = inputs.extent;
  city->demo = std::move(inputs.demo);
  city->pois = std::move(inputs.pois);
  city->windows = config.windows;
  city->budget_s = config.budget_s;
  city->sample_interval_s = config.sample_interval_s;
  city->router = std::make_unique<Router>(inputs.network, city->grid, config.routing);

  std::vector<Catchment> all;
  if (catchments) {
    all = *catchments;
  } else {
    auto batch = catchment_batch(*city->router, city->pois, city->windows, city->budget_s, city->sample_interval_s,
                                 config.threads);
    if (!batch.errors.empty()) {
      const auto& e = batch.errors.front();
      throw DataError("catchment for POI " + e.poi_id + " (" + std::string(to_string(e.window)) + ") failed: " +
                      e.message);
    }
    all = std::move(batch.catchments);
  }
  const auto keep = city->keep();
  for (auto category : kPoiCategories) {
    for (const auto& window : city->windows) {
      city->baselines.emplace(std::pair{category, window.label},
                              make_baseline(city->id, category, window, city->pois, all, city->demo, keep,
                                            city->budget_s, city->sample_interval_s));
    }
  }
  return city;
}

std::vector<Catchment> all_catchments(const CityBundle& city) {
  std::vector<Catchment> out;
  for (const auto& [key, base] : city.baselines) out.insert(out.end(), base.catchments.begin(), base.catchments.end());
  std::sort(out.begin(), out.end(), [](const Catchment& a, const Catchment& b) {
    return a.poi_id != b.poi_id ? a.poi_id < b.poi_id : a.window < b.window;
  });
  return out;
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}
}  // namespace

std::string input_fingerprint(const CityConfig& city, const Config& config) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  auto mix_file = [&](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    mix(path.filename().string());
    mix(bytes);
  };
  std::vector<std::filesystem::path> gtfs;
  if (std::filesystem::is_directory(city.gtfs)) {
    for (const auto& entry : std::filesystem::directory_iterator(city.gtfs)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") gtfs.push_back(entry.path());
    }
  }
  std::sort(gtfs.begin(), gtfs.end());
  for (const auto& p : gtfs) mix_file(p);
  mix_file(city.pois);
  mix_file(city.census_geometry);
  mix_file(city.census_demographics);
  mix(format_number(city.anchor.lat) + "," + format_number(city.anchor.lon) + "," + format_number(city.edge_m));
  const auto& r = config.routing;
  mix(format_number(r.walk_speed_mps) + "," + format_number(r.max_walk_m) + "," + std::to_string(r.transfer_slack_s) +
      "," + std::to_string(r.max_transfers) + "," + std::string(to_string(config.weekday)) + "," +
      std::to_string(config.budget_s) + "," + std::to_string(config.sample_interval_s));
  for (const auto& w : config.windows) {
    mix(std::string(to_string(w.label)) + "," + std::to_string(w.start) + "," + std::to_string(w.end));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_city_cache(const CityBundle& city, const std::filesystem::path& cache_dir, const std::string& fingerprint) {
  const auto dir = cache_dir / city.id;
  std::filesystem::create_directories(dir);
  write_text(dir / "fingerprint.txt", fingerprint + "\n");
  write_catchments(all_catchments(city), dir / "catchments.ndjson");
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& window : city.windows) {
    std::vector<AccessibilityLayer> layers;
    for (auto category : kPoiCategories) {
      const auto& base = city.baseline(category, window.label);
      const std::string stem = std::string(to_string(category)) + "_" + std::string(to_string(window.label));
      write_text(dir / ("layer_" + stem + ".csv"), layer_csv(base.layer));
      write_text(dir / ("ratios_" + stem + ".csv"), supply_ratios_csv(base.ratios));
      write_text(dir / ("report_" + stem + ".json"), reports_json(base.reports).dump(2) + "\n");
      layers.push_back(base.layer);
    }
    for (const auto& s : city_summary(layers, city.demo)) {
      summary.push_back({{"category", to_string(s.category)},
                         {"window", to_string(s.window)},
                         {"score", s.score ? nlohmann::json(*s.score) : nlohmann::json(nullptr)}});
    }
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

std::optional<std::vector<Catchment>> read_city_catchments(const std::string& city_id,
                                                           const std::filesystem::path& cache_dir,
                                                           const std::string& fingerprint) {
  const auto path = cache_dir / city_id / "catchments.ndjson";
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  std::ifstream stamp(cache_dir / city_id / "fingerprint.txt");
  std::string stored;
  if (!stamp || !std::getline(stamp, stored) || stored != fingerprint) return std::nullopt;
  return read_catchments(path);
}

}  // namespace hexaccess
