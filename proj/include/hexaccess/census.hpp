#pragma once

#include "hexaccess/demographics.hpp"
#include "hexaccess/geo.hpp"
#include "hexaccess/hexgrid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hexaccess {

struct CensusUnit {
  std::string id;
  Polygon boundary;
  DemographicVector<> demographics;
};

/// Joins a GeoJSON FeatureCollection (property "unit_id") with a demographics CSV
/// (columns unit_id, total, then one column per bracket of `schema`). MultiPolygon features
/// become one unit per part, ids suffixed "#1", "#2", ..., with counts split by area share.
std::vector<CensusUnit> parse_census(const std::filesystem::path& geometry, const std::filesystem::path& demographics,
                                     const DemographicSchema& schema);
std::vector<CensusUnit> parse_census_text(std::string_view geojson, std::string_view demographics_csv,
                                          const DemographicSchema& schema);

/// Area-proportional allocation of every unit onto the grid. Result is independent of unit order.
HexDemographics allocate_demographics(const std::vector<CensusUnit>& units, const HexGrid& grid,
                                      const DemographicSchema& schema);

}  // namespace hexaccess
