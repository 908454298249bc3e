#include "hexaccess/export.hpp"

#include "hexaccess/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hexaccess {

using nlohmann::json;

namespace {

void append_fixed(std::string& out, double v, int decimals) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  out.append(buf, ptr);
}

void append_ring(std::string& out, const Polygon& poly) {
  out += "[[";
  auto point = [&](const GeoPoint& p) {
    out += '[';
    append_fixed(out, p.lon, 7);
    out += ',';
    append_fixed(out, p.lat, 7);
    out += ']';
  };
  for (const auto& p : poly.exterior) {
    point(p);
    out += ',';
  }
  point(poly.exterior.front());
  out += "]]";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json cells_json(const std::vector<HexCellId>& cells) {
  json out = json::array();
  for (const auto& c : cells) out.push_back(to_string(c));
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string catchment_json_line(const Catchment& c) {
  json j{{"poi_id", c.poi_id},
         {"category", to_string(c.category)},
         {"window", to_string(c.window)},
         {"budget_s", c.budget_s},
         {"cells", cells_json(c.cells)}};
  return j.dump();
}

Catchment parse_catchment_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    Catchment c;
    c.poi_id = j.at("poi_id").get<std::string>();
    auto cat = parse_category(j.at("category").get<std::string>());
    auto win = parse_window(j.at("window").get<std::string>());
    if (!cat || !win) throw DataError("catchment line has unknown category or window");
    c.category = *cat;
    c.window = *win;
    c.budget_s = j.at("budget_s").get<Seconds>();
    for (const auto& cell : j.at("cells")) c.cells.push_back(parse_cell_id(cell.get<std::string>()));
    if (!std::is_sorted(c.cells.begin(), c.cells.end())) throw DataError("catchment cells are not sorted");
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed catchment line: ") + e.what());
  }
}

void write_catchments(const std::vector<Catchment>& catchments, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& c : catchments) out << catchment_json_line(c) << '\n';
}

std::vector<Catchment> read_catchments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Catchment> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_catchment_line(line));
  }
  return out;
}

std::string layer_csv(const AccessibilityLayer& layer) {
  std::string out = "cell_id,score\n";
  for (std::size_t i = 0; i < layer.cells.size(); ++i) {
    out += to_string(layer.cells[i]);
    out += ',';
    out += format_number(layer.scores[static_cast<Eigen::Index>(i)]);
    out += '\n';
  }
  return out;
}

std::string layer_geojson(const AccessibilityLayer& layer, const HexGrid& grid, const HexDemographics& demo,
                          std::optional<Dimension> dimension) {
  const auto& schema = demo.schema();
  std::vector<std::pair<std::string, Eigen::Index>> brackets;
  if (dimension) {
    for (const auto& name : schema.brackets(*dimension)) brackets.emplace_back(json(name).dump(), schema.index_of(*dimension, name));
  }
  std::string out;
  out.reserve(layer.cells.size() * 420 + 128);
  out += R"({"type":"FeatureCollection","city":)";
  out += json(layer.city).dump();
  out += R"(,"category":")";
  out += to_string(layer.category);
  out += R"(","window":")";
  out += to_string(layer.window);
  out += R"(","features":[)";
  for (std::size_t i = 0; i < layer.cells.size(); ++i) {
    const auto& cell = layer.cells[i];
    if (i) out += ',';
    out += R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":)";
    append_ring(out, cell_polygon(grid, cell));
    out += R"(},"properties":{"cell_id":")";
    out += to_string(cell);
    out += R"(","score":)";
    out += format_number(layer.scores[static_cast<Eigen::Index>(i)]);
    const auto col = demo.find(cell);
    out += R"(,"population":)";
    out += format_number(col ? demo.counts()(0, *col) : 0.0);
    for (const auto& [key, row] : brackets) {
      out += ',';
      out += key;
      out += ':';
      out += format_number(col ? demo.counts()(row, *col) : 0.0);
    }
    out += "}}";
  }
  out += "]}";
  return out;
}

json report_json(const EquityReport& report) {
  json brackets = json::array();
  for (const auto& b : report.brackets) {
    brackets.push_back({{"name", b.name}, {"score", optional_number(b.score)}, {"population", b.population}});
  }
  return {{"dimension", to_string(report.dimension)},
          {"brackets", std::move(brackets)},
          {"gap_ratio", optional_number(report.gap_ratio)}};
}

json reports_json(std::span<const EquityReport> reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(report_json(r));
  return out;
}

json report_diff_json(std::span<const ReportDiff> diffs) {
  json out = json::array();
  for (const auto& d : diffs) {
    json brackets = json::array();
    for (const auto& b : d.brackets) brackets.push_back({{"name", b.name}, {"delta", optional_number(b.delta)}});
    out.push_back({{"dimension", to_string(d.dimension)},
                   {"brackets", std::move(brackets)},
                   {"gap_ratio_change", optional_number(d.gap_ratio_change)}});
  }
  return out;
}

std::string supply_ratios_csv(std::span<const SupplyRatio> ratios) {
  std::string out = "poi_id,r_value,catchment_pop,degenerate\n";
  for (const auto& r : ratios) {
    out += r.poi_id + "," + format_number(r.r_value) + "," + format_number(r.catchment_pop) + "," +
           (r.degenerate ? "true" : "false") + "\n";
  }
  return out;
}

json poi_json(const Poi& poi) {
  return {{"id", poi.id},
          {"category", to_string(poi.category)},
          {"name", poi.name},
          {"lat", poi.location.lat},
          {"lon", poi.location.lon},
          {"supply_units", poi.supply_units},
          {"origin", to_string(poi.origin)}};
}

Poi poi_from_json(const json& j, PoiOrigin origin) {
  if (!j.is_object()) throw InvalidRequestError("POI must be a JSON object");
  Poi p;
  p.origin = origin;
  try {
    if (j.contains("id")) p.id = j.at("id").get<std::string>();
    auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw InvalidRequestError("unknown POI category " + j.at("category").get<std::string>());
    p.category = *cat;
    p.name = j.value("name", std::string());
    p.location = {j.at("lat").get<double>(), j.at("lon").get<double>()};
    p.supply_units = j.value("supply_units", 1.0);
  } catch (const json::exception& e) {
    throw InvalidRequestError(std::string("malformed POI: ") + e.what());
  }
  if (!(p.supply_units > 0.0) || !std::isfinite(p.supply_units)) {
    throw InvalidRequestError("supply_units must be positive");
  }
  try {
    validate(p.location);
  } catch (const DomainError& e) {
    throw InvalidRequestError(e.what());
  }
  return p;
}

json pois_geojson(std::span<const Poi> pois) {
  json features = json::array();
  for (const auto& p : pois) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {p.location.lon, p.location.lat}}}},
                        {"properties", poi_json(p)}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json scenario_json(const Scenario& scenario) {
  json added = json::array();
  for (const auto& p : scenario.added) added.push_back(poi_json(p));
  return {{"id", scenario.id},
          {"city", scenario.city},
          {"added", std::move(added)},
          {"removed", json(std::vector<std::string>(scenario.removed.begin(), scenario.removed.end()))},
          {"created_at", scenario.created_at}};
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw InvalidRequestError("scenario must be a JSON object");
  Scenario s;
  try {
    s.id = j.value("id", std::string());
    s.city = j.at("city").get<std::string>();
    if (j.contains("added")) {
      for (const auto& p : j.at("added")) {
        s.added.push_back(poi_from_json(p, PoiOrigin::scenario));
        if (s.added.back().id.empty()) throw InvalidRequestError("imported scenario POIs need ids");
      }
    }
    if (j.contains("removed")) {
      for (const auto& id : j.at("removed")) s.removed.insert(id.get<std::string>());
    }
    s.created_at = j.value("created_at", std::int64_t{0});
  } catch (const json::exception& e) {
    throw InvalidRequestError(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

json catchment_geojson(const Catchment& catchment, const HexGrid& grid) {
  json features = json::array();
  for (const auto& cell : catchment.cells) {
    json ring = json::array();
    const auto poly = cell_polygon(grid, cell);
    for (const auto& p : poly.exterior) ring.push_back({p.lon, p.lat});
    ring.push_back({poly.exterior.front().lon, poly.exterior.front().lat});
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                        {"properties", {{"cell_id", to_string(cell)}}}});
  }
  return {{"type", "FeatureCollection"},
          {"poi_id", catchment.poi_id},
          {"category", to_string(catchment.category)},
          {"window", to_string(catchment.window)},
          {"budget_s", catchment.budget_s},
          {"features", std::move(features)}};
}

json scenario_result_json(const Scenario& scenario, const ScenarioResult& result, const HexGrid& grid,
                          const HexDemographics& demo, std::optional<Dimension> dimension) {
  json delta = json::array();
  for (const auto& [cell, d] : result.delta) delta.push_back({{"cell_id", to_string(cell)}, {"delta", d}});
  json ratios = json::array();
  for (const auto& r : result.added_ratios) {
    ratios.push_back({{"poi_id", r.poi_id},
                      {"r_value", r.r_value},
                      {"catchment_pop", r.catchment_pop},
                      {"degenerate", r.degenerate}});
  }
  const auto diffs = diff_reports(result.baseline_reports, result.scenario_reports);
  return {{"scenario_id", scenario.id},
          {"city", scenario.city},
          {"category", to_string(result.layer.category)},
          {"window", to_string(result.layer.window)},
          {"layer", json::parse(layer_geojson(result.layer, grid, demo, dimension))},
          {"delta", std::move(delta)},
          {"added_ratios", std::move(ratios)},
          {"reports",
           {{"baseline", reports_json(result.baseline_reports)},
            {"scenario", reports_json(result.scenario_reports)},
            {"diff", report_diff_json(diffs)}}}};
}

}  // namespace hexaccess
