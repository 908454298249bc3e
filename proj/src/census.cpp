#include "hexaccess/census.hpp"

#include "hexaccess/csv.hpp"
#include "hexaccess/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hexaccess {

namespace {

using nlohmann::json;

std::vector<GeoPoint> parse_ring(const json& ring, const std::string& unit) {
  if (!ring.is_array()) throw DataError("unit " + unit + ": ring is not an array");
  std::vector<GeoPoint> out;
  for (const auto& pos : ring) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw DataError("unit " + unit + ": malformed position");
    }
    out.push_back({pos[1].get<double>(), pos[0].get<double>()});
  }
  return out;
}

Polygon parse_polygon(const json& rings, const std::string& unit) {
  if (!rings.is_array() || rings.empty()) throw DataError("unit " + unit + ": polygon has no rings");
  std::vector<std::vector<GeoPoint>> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(parse_ring(rings[i], unit));
  try {
    return make_polygon(parse_ring(rings[0], unit), std::move(holes));
  } catch (const DomainError& e) {
    throw DataError("unit " + unit + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

std::vector<CensusUnit> parse_impl(std::string_view geojson, const CsvTable& table, const DemographicSchema& schema,
                                   const std::string& geometry_name) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (const json::parse_error& e) {
    throw DataError(geometry_name + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") || !doc["features"].is_array()) {
    throw DataError(geometry_name + ": expected a GeoJSON FeatureCollection");
  }

  std::map<std::string, std::vector<Polygon>> shapes;
  for (const auto& feature : doc["features"]) {
    const auto& props = feature.contains("properties") ? feature["properties"] : json();
    if (!props.is_object() || !props.contains("unit_id")) throw DataError(geometry_name + ": feature without unit_id");
    const auto& raw_id = props["unit_id"];
    const std::string id = raw_id.is_string() ? raw_id.get<std::string>() : raw_id.dump();
    if (shapes.count(id)) throw DataError(geometry_name + ": duplicate unit_id " + id);
    const auto& geom = feature.contains("geometry") ? feature["geometry"] : json();
    const std::string type = geom.is_object() ? geom.value("type", "") : "";
    auto& parts = shapes[id];
    if (type == "Polygon") {
      parts.push_back(parse_polygon(geom["coordinates"], id));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : geom["coordinates"]) parts.push_back(parse_polygon(poly, id));
      if (parts.empty()) throw DataError("unit " + id + ": empty MultiPolygon");
    } else {
      throw DataError("unit " + id + ": unsupported geometry type '" + type + "'");
    }
  }

  const auto c_id = table.require_column("unit_id");
  const auto c_total = table.require_column("total");
  std::vector<std::pair<Eigen::Index, std::size_t>> columns;
  for (auto d : kGroupDimensions) {
    for (const auto& bracket : schema.brackets(d)) {
      columns.emplace_back(schema.index_of(d, bracket), table.require_column(bracket));
    }
  }

  std::map<std::string, DemographicVector<>> rows;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string at = table.source() + ":" + std::to_string(table.line(i));
    const std::string id = trim(table.field(i, c_id));
    DemographicVector<> v = DemographicVector<>::Zero(schema.size());
    auto read = [&](std::size_t column, std::string_view name) {
      auto value = parse_double(table.field(i, column));
      if (!value || !std::isfinite(*value)) throw DataError(at + ": malformed count in column " + std::string(name));
      if (*value < 0.0) throw DataError(at + ": negative count in column " + std::string(name));
      return *value;
    };
    v[0] = read(c_total, "total");
    for (const auto& [index, column] : columns) v[index] = read(column, table.header()[column]);
    check_demographics(schema, v, 0.5, at + " (unit " + id + ")");
    if (!rows.emplace(id, std::move(v)).second) throw DataError(at + ": duplicate unit_id " + id);
  }

  std::vector<std::string> no_row, no_shape;
  for (const auto& [id, parts] : shapes) {
    if (!rows.count(id)) no_row.push_back(id);
  }
  for (const auto& [id, v] : rows) {
    if (!shapes.count(id)) no_shape.push_back(id);
  }
  if (!no_row.empty() || !no_shape.empty()) {
    std::string msg = "census inputs do not match:";
    if (!no_row.empty()) msg += " geometry without demographics [" + join(no_row) + "]";
    if (!no_shape.empty()) msg += " demographics without geometry [" + join(no_shape) + "]";
    throw DataError(msg);
  }

  std::vector<CensusUnit> units;
  for (auto& [id, parts] : shapes) {
    const auto& demo = rows.at(id);
    if (parts.size() == 1) {
      units.push_back({id, std::move(parts.front()), demo});
      continue;
    }
    double total_area = 0.0;
    for (const auto& p : parts) total_area += relative_area(p);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const double share = relative_area(parts[k]) / total_area;
      units.push_back({id + "#" + std::to_string(k + 1), std::move(parts[k]), demo * share});
    }
  }
  return units;
}

}  // namespace

std::vector<CensusUnit> parse_census(const std::filesystem::path& geometry, const std::filesystem::path& demographics,
                                     const DemographicSchema& schema) {
  return parse_impl(read_file(geometry), CsvTable::read(demographics), schema, geometry.string());
}

std::vector<CensusUnit> parse_census_text(std::string_view geojson, std::string_view demographics_csv,
                                          const DemographicSchema& schema) {
  return parse_impl(geojson, CsvTable::parse(demographics_csv), schema, "<geojson>");
}

HexDemographics allocate_demographics(const std::vector<CensusUnit>& units, const HexGrid& grid,
                                      const DemographicSchema& schema) {
  std::vector<const CensusUnit*> ordered;
  ordered.reserve(units.size());
  for (const auto& u : units) ordered.push_back(&u);
  std::sort(ordered.begin(), ordered.end(), [](const CensusUnit* a, const CensusUnit* b) { return a->id < b->id; });
  if (std::adjacent_find(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->id == b->id; }) !=
      ordered.end()) {
    throw DataError("duplicate census unit id");
  }

  std::map<HexCellId, DemographicVector<>> cells;
  for (const CensusUnit* unit : ordered) {
    if (unit->demographics.size() != schema.size()) throw DataError("unit " + unit->id + ": schema mismatch");
    for (const auto& [cell, fraction] : polygon_cells(grid, unit->boundary)) {
      auto [it, inserted] = cells.try_emplace(cell, DemographicVector<>::Zero(schema.size()));
      it->second += fraction * unit->demographics;
    }
  }
  return HexDemographics::from_map(schema, cells);
}

}  // namespace hexaccess
