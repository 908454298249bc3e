#pragma once

#include "hexaccess/access.hpp"
#include "hexaccess/hexgrid.hpp"
#include "hexaccess/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hexaccess {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

// Catchments: one JSON object per line {poi_id, category, window, budget_s, cells: ["q:r", ...]}.
std::string catchment_json_line(const Catchment& c);
Catchment parse_catchment_line(std::string_view line);
void write_catchments(const std::vector<Catchment>& catchments, const std::filesystem::path& path);
std::vector<Catchment> read_catchments(const std::filesystem::path& path);

/// "cell_id,score" rows sorted by cell.
std::string layer_csv(const AccessibilityLayer& layer);

/// FeatureCollection with one hexagon per layer cell; properties cell_id, score, population and,
/// when a dimension is given, one count per bracket of that dimension.
std::string layer_geojson(const AccessibilityLayer& layer, const HexGrid& grid, const HexDemographics& demo,
                          std::optional<Dimension> dimension);

nlohmann::json report_json(const EquityReport& report);
nlohmann::json reports_json(std::span<const EquityReport> reports);
nlohmann::json report_diff_json(std::span<const ReportDiff> diffs);
std::string supply_ratios_csv(std::span<const SupplyRatio> ratios);

nlohmann::json poi_json(const Poi& poi);
/// Throws InvalidRequestError for missing or malformed fields. `origin` is forced onto the result.
Poi poi_from_json(const nlohmann::json& j, PoiOrigin origin);
nlohmann::json pois_geojson(std::span<const Poi> pois);

nlohmann::json scenario_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

/// Per-cell features for a catchment plus poi_id/category/window/budget_s members.
nlohmann::json catchment_geojson(const Catchment& catchment, const HexGrid& grid);

nlohmann::json scenario_result_json(const Scenario& scenario, const ScenarioResult& result, const HexGrid& grid,
                                    const HexDemographics& demo, std::optional<Dimension> dimension);

}  // namespace hexaccess
