#pragma once

#include "hexaccess/config.hpp"
#include "hexaccess/scenario.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hexaccess {

/// Everything the service knows about one city. Immutable once loaded.
struct CityBundle {
  std::string id;
  std::string name;
  HexGrid grid{GeoPoint{}};
  GeoBox extent;
  HexDemographics demo;
  std::vector<Poi> pois;  // every category, sorted by id
  std::unique_ptr<Router> router;
  std::vector<TimeWindow> windows;
  Seconds budget_s = kDefaultBudget;
  Seconds sample_interval_s = kDefaultSampleInterval;
  std::map<std::pair<PoiCategory, WindowLabel>, BaselineState> baselines;

  /// Catchment cells without demographics are kept when their centre lies inside the extent.
  CellFilter keep() const;
  ScenarioContext context() const;
  const TimeWindow& window(WindowLabel label) const;
  /// Throws NotFoundError when the pair was not built.
  const BaselineState& baseline(PoiCategory category, WindowLabel window) const;
  const Poi* poi(std::string_view poi_id) const;
  std::vector<PoiCategory> categories() const;
};

/// Raw inputs for a city before any routing: parsed and allocated, with a grid and extent.
struct CityInputs {
  CityConfig config;
  HexGrid grid{GeoPoint{}};
  GeoBox extent;
  HexDemographics demo;
  std::vector<Poi> pois;
  TimetableNetwork network;
};

CityInputs load_city_inputs(const CityConfig& city, const Config& config);

/// Builds router and every baseline. When `catchments` is given they are used instead of routing.
std::unique_ptr<CityBundle> build_city(CityInputs inputs, const Config& config,
                                       const std::optional<std::vector<Catchment>>& catchments = std::nullopt);

/// All catchments of a bundle ordered by (poi id, window).
std::vector<Catchment> all_catchments(const CityBundle& city);

/// FNV-1a digest (hex) over the city's input files and every setting that shapes catchments.
std::string input_fingerprint(const CityConfig& city, const Config& config);

/// Writes fingerprint.txt, catchments.ndjson, layer_<category>_<window>.csv,
/// ratios_<category>_<window>.csv, report_<category>_<window>.json and summary.json under
/// <cache_dir>/<city id>/.
void write_city_cache(const CityBundle& city, const std::filesystem::path& cache_dir, const std::string& fingerprint);

/// Catchments previously written by write_city_cache, or nullopt when there is no cache or it was
/// written for different inputs.
std::optional<std::vector<Catchment>> read_city_catchments(const std::string& city_id,
                                                           const std::filesystem::path& cache_dir,
                                                           const std::string& fingerprint);

}  // namespace hexaccess
