#pragma once

#include "hexaccess/city.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace hexaccess {

inline constexpr GeoPoint kGridvilleAnchor{33.75, -84.39};

/// Offset (column, row) to axial for the odd-q layout used by the fixtures.
HexCellId offset_cell(int col, int row);

/// The 400 populated Gridville cells: columns -10..9 by rows -10..9, sorted.
std::vector<HexCellId> gridville_cells();

/// Writes gridville.json and gridville/{gtfs/, pois.csv, census.geojson, census.csv} under `dir`.
/// Output is a pure function of the code; regenerating gives byte-identical files.
void write_gridville(const std::filesystem::path& dir);

/// Outline of a simply connected set of cells, counterclockwise, without the closing vertex.
PlanarRing cells_outline(const HexGrid& grid, const std::vector<HexCellId>& cells);

struct SyntheticCityParams {
  int columns = 371;
  int rows = 370;
  std::size_t poi_count = 1000;
  PoiCategory category = PoiCategory::vaccination_center;
  int line_spacing = 12;  // cells between parallel bus lines
  Seconds headway_s = 900;
  Seconds first_departure = 6 * 3600;
  Seconds last_departure = 21 * 3600;
  std::uint64_t seed = 7;
};

/// Large in-memory city for scale runs: a populated block of cells, a lattice of bus lines and
/// randomly placed POIs of one category.
CityInputs make_synthetic_city(const SyntheticCityParams& params);

}  // namespace hexaccess
