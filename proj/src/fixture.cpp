#include "hexaccess/fixture.hpp"

#include "hexaccess/errors.hpp"
#include "hexaccess/export.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace hexaccess {

HexCellId offset_cell(int col, int row) { return {col, row - (col - (col & 1)) / 2}; }

std::vector<HexCellId> gridville_cells() {
  std::vector<HexCellId> out;
  for (int col = -10; col < 10; ++col) {
    for (int row = -10; row < 10; ++row) out.push_back(offset_cell(col, row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

PlanarRing cells_outline(const HexGrid& grid, const std::vector<HexCellId>& cells) {
  using Key = std::pair<std::int64_t, std::int64_t>;
  auto key = [](const PlanarPoint& p) {
    return Key{std::llround(p.x() * 1000.0), std::llround(p.y() * 1000.0)};
  };
  std::set<std::pair<Key, Key>> edges;
  std::map<Key, PlanarPoint> points;
  for (const auto& c : cells) {
    const auto ring = cell_ring_planar(grid, c);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const auto& a = ring[i];
      const auto& b = ring[(i + 1) % ring.size()];
      edges.emplace(key(a), key(b));
      points.emplace(key(a), a);
    }
  }
  std::map<Key, Key> next;
  for (const auto& [a, b] : edges) {
    if (!edges.count({b, a})) {
      if (!next.emplace(a, b).second) throw DomainError("cell set is not simply connected");
    }
  }
  if (next.empty()) throw DomainError("empty cell set");
  PlanarRing out;
  const Key start = next.begin()->first;
  Key at = start;
  do {
    out.push_back(points.at(at));
    at = next.at(at);
    if (out.size() > next.size()) throw DomainError("cell set is not simply connected");
  } while (at != start);
  if (out.size() != next.size()) throw DomainError("cell set has more than one boundary");
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

GeoPoint rounded(const GeoPoint& p) { return {round6(p.lat), round6(p.lon)}; }

// Planar offset in meters from the centre of an offset cell.
GeoPoint gridville_point(const HexGrid& grid, int col, int row, double dx = 0, double dy = 0) {
  PlanarPoint xy = cell_center_planar(grid, offset_cell(col, row));
  xy += PlanarPoint(dx, dy);
  return rounded(unproject(grid, xy));
}

struct Line {
  std::string route_id;
  std::string name;
  std::vector<std::uint32_t> stops;
};

// Peak service every 10 minutes, midday every 20, evening every 15, otherwise half-hourly.
Seconds weekday_headway(Seconds t) {
  const Seconds h = t / 3600;
  if ((h >= 7 && h < 9) || (h >= 17 && h < 19)) return h < 12 ? 600 : 900;
  if (h >= 11 && h < 15) return 1200;
  return 1800;
}

TimetableNetwork gridville_network(const HexGrid& grid) {
  TimetableNetwork net;
  std::map<std::pair<int, int>, std::uint32_t> by_cell;
  auto stop_at = [&](int col, int row, const std::string& id, const std::string& name) {
    auto [it, fresh] = by_cell.emplace(std::pair{col, row}, static_cast<std::uint32_t>(net.stops.size()));
    if (fresh) net.stops.push_back({id, name, gridville_point(grid, col, row)});
    return it->second;
  };
  Line east{"crosstown", "Crosstown", {}};
  for (int col = -10; col <= 8; col += 2) {
    east.stops.push_back(col == 0 ? stop_at(0, 0, "central", "Central")
                                  : stop_at(col, 0, "ew" + std::to_string(col), "Main St & " + std::to_string(col)));
  }
  Line north{"uptown", "Uptown", {}};
  for (int row = -10; row <= 8; row += 2) {
    north.stops.push_back(row == 0 ? stop_at(0, 0, "central", "Central")
                                   : stop_at(0, row, "ns" + std::to_string(row), "Park Ave & " + std::to_string(row)));
  }

  net.services.push_back({"weekday", {true, true, true, true, true, false, false}, "20260101", "20261231"});
  net.services.push_back({"weekend", {false, false, false, false, false, true, true}, "20260101", "20261231"});

  const std::vector<Line> lines = {east, north};
  for (std::uint32_t li = 0; li < lines.size(); ++li) {
    const auto& line = lines[li];
    net.routes.push_back({line.route_id, line.name, 3});
    for (int dir = 0; dir < 2; ++dir) {
      auto stops = line.stops;
      if (dir == 1) std::reverse(stops.begin(), stops.end());
      for (const std::string service : {"weekday", "weekend"}) {
        int n = 0;
        // Offsets keep the two lines from meeting at Central on the same minute.
        for (Seconds t = 6 * 3600 + static_cast<Seconds>(li) * 300 + dir * 120; t <= 24 * 3600 + 1800;
             t += service == "weekend" ? 1800 : weekday_headway(t)) {
          Trip trip;
          trip.id = line.route_id + (dir == 0 ? "_out_" : "_in_") + service + "_" + std::to_string(++n);
          trip.route = li;
          trip.service_id = service;
          Seconds clock = t;
          for (std::size_t k = 0; k < stops.size(); ++k) {
            const Seconds dwell = k == 0 || k + 1 == stops.size() ? 0 : 20;
            trip.stop_times.push_back({stops[k], static_cast<std::int32_t>(k + 1), clock, clock + dwell});
            clock += dwell + 300;
          }
          net.trips.push_back(std::move(trip));
        }
      }
    }
  }
  validate(net);
  return net;
}

std::vector<Poi> gridville_pois(const HexGrid& grid) {
  struct Spec {
    const char* id;
    PoiCategory category;
    const char* name;
    int col, row;
    double dx, dy;
    double supply;
  };
  using C = PoiCategory;
  const Spec specs[] = {
      {"v1", C::vaccination_center, "Central Pharmacy", 1, 1, 20, -35, 1},
      {"v2", C::vaccination_center, "Westside Clinic Pop-up", -7, -4, 0, 0, 1},
      {"v3", C::vaccination_center, "North Library Site", 5, 7, -40, 10, 1.5},
      {"v4", C::vaccination_center, "Eastgate Drugstore", 8, -8, 15, 15, 1},
      {"g1", C::grocery, "Market Hall", 2, -1, 0, 30, 1},
      {"g2", C::grocery, "Corner Grocer", -9, 6, 10, -10, 1},
      {"g3", C::grocery, "Fresh Foods", -3, 3, -50, 0, 2},
      {"g4", C::grocery, "Southside Supermarket", 6, -9, 0, 0, 1},
      {"g5", C::grocery, "Uptown Mart", 0, 8, 25, 25, 1},
      {"r1", C::restaurant, "Diner 24", 0, 1, 0, -60, 1},
      {"r2", C::restaurant, "Noodle Bar", -5, 0, 30, 20, 1},
      {"r3", C::restaurant, "Taqueria", 4, 4, 0, 0, 1},
      {"r4", C::restaurant, "Bistro", -8, -8, -20, 40, 1},
      {"r5", C::restaurant, "Pizzeria", 9, 2, -30, 0, 1},
      {"r6", C::restaurant, "Cafe Verde", -2, -6, 10, 10, 1},
      {"s1", C::school, "Gridville Elementary", -4, 5, 0, 0, 1},
      {"s2", C::school, "Central Middle", 3, -3, 0, 0, 1},
      {"s3", C::school, "Eastside High", 7, 5, 40, -20, 1},
      {"s4", C::school, "Westwood Academy", -9, -2, 0, 0, 1},
      {"h1", C::hospital_clinic, "General", -3, 7, 160, 0, 36},
      {"h2", C::hospital_clinic, "Mercy Clinic", 1, -1, 0, 0, 1},
      {"h3", C::hospital_clinic, "Children's Hospital", 6, 3, -25, 30, 2},
      {"c1", C::cinema_theatre, "Grand Theatre", 0, -2, 30, 0, 1},
      {"c2", C::cinema_theatre, "Cineplex", 7, -5, 0, 0, 1},
      {"c3", C::cinema_theatre, "Playhouse", -6, 2, 0, 0, 1},
  };
  std::vector<Poi> out;
  for (const auto& s : specs) {
    out.push_back({s.id, s.category, s.name, gridville_point(grid, s.col, s.row, s.dx, s.dy), s.supply,
                   PoiOrigin::baseline});
  }
  return out;
}

struct UnitBlock {
  std::string id;
  int col0, col1, row0, row1;  // inclusive offset ranges
};

std::vector<UnitBlock> gridville_units() {
  const int col_bands[5] = {-10, -5, 0, 5, 10};
  const int row_bands[4] = {-10, -3, 4, 10};
  std::vector<UnitBlock> out;
  for (int rb = 0; rb < 3; ++rb) {
    for (int cb = 0; cb < 4; ++cb) {
      char id[16];
      std::snprintf(id, sizeof id, "bg%02d", rb * 4 + cb + 1);
      out.push_back({id, col_bands[cb], col_bands[cb + 1] - 1, row_bands[rb], row_bands[rb + 1] - 1});
    }
  }
  return out;
}

// Integer counts with the given weights that sum exactly to `total`.
std::vector<long> split(long total, const std::vector<double>& weights) {
  double sum = 0;
  for (double w : weights) sum += w;
  std::vector<long> out;
  long used = 0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    out.push_back(std::lround(static_cast<double>(total) * weights[i] / sum));
    used += out.back();
  }
  out.push_back(total - used);
  return out;
}

std::string number(double v) { return format_number(v); }

}  // namespace

void write_gridville(const std::filesystem::path& dir) {
  const HexGrid grid(kGridvilleAnchor);
  const auto root = dir / "gridville";
  std::filesystem::create_directories(root / "gtfs");

  write_gtfs(gridville_network(grid), root / "gtfs");
  write_pois(gridville_pois(grid), root / "pois.csv");

  const DemographicSchema schema;
  std::string geo = "{\"type\":\"FeatureCollection\",\"features\":[\n";
  std::string csv = "unit_id,total";
  for (auto d : kGroupDimensions) {
    for (const auto& b : schema.brackets(d)) csv += "," + b;
  }
  csv += "\n";
  const auto units = gridville_units();
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    std::vector<HexCellId> cells;
    for (int col = unit.col0; col <= unit.col1; ++col) {
      for (int row = unit.row0; row <= unit.row1; ++row) cells.push_back(offset_cell(col, row));
    }
    geo += u ? ",\n" : "";
    geo += "{\"type\":\"Feature\",\"properties\":{\"unit_id\":\"" + unit.id +
           "\"},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[";
    auto ring = cells_outline(grid, cells);
    ring.push_back(ring.front());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const auto p = unproject(grid, ring[i]);
      geo += (i ? "," : "") + std::string("[") + number(p.lon) + "," + number(p.lat) + "]";
    }
    geo += "]]}}";

    // 100 people per cell; group mixes drift across the city so equity reports are not flat.
    const long total = 100 * static_cast<long>(cells.size());
    const double k = static_cast<double>(u);
    const auto west = static_cast<double>(unit.col0 + 10) / 15.0;  // 0 west .. 1 east
    const auto south = static_cast<double>(unit.row0 + 10) / 14.0;  // 0 south .. 1 north
    std::vector<std::vector<long>> dims = {
        split(total, {0.2 + 0.5 * west, 0.55 - 0.4 * west, 0.1 + 0.1 * south, 0.15}),
        split(total, {0.12 + 0.02 * k, 0.3, 0.08 + 0.05 * south, 0.11 + 0.01 * k, 0.3, 0.09}),
        split(total, {0.15 - 0.1 * west, 0.35, 0.25 + 0.1 * south, 0.15 + 0.05 * west, 0.05 + 0.05 * west}),
        split(total, {0.35 - 0.25 * west, 0.65 + 0.25 * west}),
    };
    csv += unit.id + "," + std::to_string(total);
    for (const auto& d : dims) {
      for (long v : d) csv += "," + std::to_string(v);
    }
    csv += "\n";
  }
  geo += "\n]}\n";
  write_text(root / "census.geojson", geo);
  write_text(root / "census.csv", csv);

  // Extent: cell centres of the block plus a 10 m margin.
  const double e = grid.edge();
  const double s3 = std::sqrt(3.0);
  const auto lo = unproject(grid, PlanarPoint(-15.0 * e - 10.0, -10.0 * s3 * e - 10.0));
  const auto hi = unproject(grid, PlanarPoint(13.5 * e + 10.0, 9.5 * s3 * e + 10.0));
  nlohmann::ordered_json cfg = {
      {"listen", {{"host", "127.0.0.1"}, {"port", 8080}}},
      {"cache_dir", "cache"},
      {"ui_dir", "../webui/dist"},
      {"service_weekday", "wednesday"},
      {"windows", {{"morning", {"07:00", "09:00"}}, {"afternoon", {"12:00", "14:00"}}, {"evening", {"17:00", "19:00"}}}},
      {"routing",
       {{"walk_speed_mps", 1.4},
        {"max_walk_m", 800},
        {"transfer_slack_s", 60},
        {"max_transfers", 3},
        {"budget_s", 1800},
        {"sample_interval_s", 1800}}},
      {"cities",
       {{{"id", "gridville"},
         {"name", "Gridville"},
         {"anchor", {{"lat", kGridvilleAnchor.lat}, {"lon", kGridvilleAnchor.lon}}},
         {"edge_m", kDefaultEdgeM},
         {"bbox", {{"min_lat", std::floor(lo.lat * 1e6) / 1e6}, {"min_lon", std::floor(lo.lon * 1e6) / 1e6},
                   {"max_lat", std::ceil(hi.lat * 1e6) / 1e6}, {"max_lon", std::ceil(hi.lon * 1e6) / 1e6}}},
         {"gtfs", "gridville/gtfs"},
         {"pois", "gridville/pois.csv"},
         {"census_geometry", "gridville/census.geojson"},
         {"census_demographics", "gridville/census.csv"}}}}};
  write_text(dir / "gridville.json", cfg.dump(2) + "\n");
}

CityInputs make_synthetic_city(const SyntheticCityParams& params) {
  if (params.columns < 2 || params.rows < 2 || params.line_spacing < 1) throw DomainError("synthetic city too small");
  CityInputs in;
  in.config.id = "synthetic";
  in.config.name = "Synthetic";
  in.config.anchor = {40.0, -100.0};
  in.grid = HexGrid(in.config.anchor);
  const int c0 = -params.columns / 2, r0 = -params.rows / 2;
  const int c1 = c0 + params.columns - 1, r1 = r0 + params.rows - 1;

  std::mt19937_64 rng(params.seed);
  const DemographicSchema schema;
  std::vector<HexCellId> cells;
  cells.reserve(static_cast<std::size_t>(params.columns) * static_cast<std::size_t>(params.rows));
  for (int col = c0; col <= c1; ++col) {
    for (int row = r0; row <= r1; ++row) cells.push_back(offset_cell(col, row));
  }
  std::sort(cells.begin(), cells.end());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(schema.size(), static_cast<Eigen::Index>(cells.size()));
  std::uniform_real_distribution<double> pop(0.0, 400.0);
  std::uniform_real_distribution<double> share(0.05, 1.0);
  for (Eigen::Index j = 0; j < counts.cols(); ++j) {
    const double total = std::floor(pop(rng));
    counts(0, j) = total;
    for (auto d : kGroupDimensions) {
      const auto n = static_cast<Eigen::Index>(schema.brackets(d).size());
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) w(i) = share(rng);
      counts.block(schema.offset(d), j, n, 1) = w * (total / w.sum());
    }
  }
  in.demo = HexDemographics(schema, std::move(cells), std::move(counts));

  const double e = in.grid.edge();
  const double s3 = std::sqrt(3.0);
  const auto lo = unproject(in.grid, PlanarPoint(1.5 * e * c0 - 10.0, s3 * e * r0 - 10.0));
  const auto hi = unproject(in.grid, PlanarPoint(1.5 * e * c1 + 10.0, s3 * e * (r1 + 0.5) + 10.0));
  in.extent = {lo.lat, lo.lon, hi.lat, hi.lon};

  auto& net = in.network;
  net.services.push_back({"daily", {true, true, true, true, true, true, true}, "20260101", "20261231"});
  std::map<std::pair<int, int>, std::uint32_t> stop_ids;
  auto stop_at = [&](int col, int row) {
    auto [it, fresh] = stop_ids.emplace(std::pair{col, row}, static_cast<std::uint32_t>(net.stops.size()));
    if (fresh) {
      net.stops.push_back({"s" + std::to_string(col) + "_" + std::to_string(row), "",
                           cell_center(in.grid, offset_cell(col, row))});
    }
    return it->second;
  };
  auto add_line = [&](std::vector<std::uint32_t> stops, Seconds hop, Seconds phase) {
    const auto route = static_cast<std::uint32_t>(net.routes.size());
    net.routes.push_back({"L" + std::to_string(route), "", 3});
    for (int dir = 0; dir < 2; ++dir) {
      if (dir == 1) std::reverse(stops.begin(), stops.end());
      int n = 0;
      for (Seconds t = params.first_departure + phase; t <= params.last_departure; t += params.headway_s) {
        Trip trip{net.routes.back().id + "_" + std::to_string(dir) + "_" + std::to_string(++n), route, "daily", {}};
        trip.stop_times.reserve(stops.size());
        Seconds clock = t;
        for (std::size_t k = 0; k < stops.size(); ++k) {
          trip.stop_times.push_back({stops[k], static_cast<std::int32_t>(k + 1), clock, clock});
          clock += hop;
        }
        net.trips.push_back(std::move(trip));
      }
    }
  };
  int phase = 0;
  for (int row = r0; row <= r1; row += params.line_spacing) {
    std::vector<std::uint32_t> stops;
    for (int col = c0; col <= c1; col += 2) stops.push_back(stop_at(col, row));
    add_line(std::move(stops), 120, (phase++ * 60) % params.headway_s);
  }
  for (int col = c0; col <= c1; col += params.line_spacing) {
    std::vector<std::uint32_t> stops;
    for (int row = r0; row <= r1; row += 2) stops.push_back(stop_at(col, row));
    add_line(std::move(stops), 130, (phase++ * 60) % params.headway_s);
  }
  validate(net);

  std::uniform_real_distribution<double> ux(1.5 * e * c0, 1.5 * e * c1);
  std::uniform_real_distribution<double> uy(s3 * e * r0, s3 * e * r1);
  for (std::size_t i = 0; i < params.poi_count; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%05zu", i);
    in.pois.push_back({id, params.category, id, unproject(in.grid, PlanarPoint(ux(rng), uy(rng))), 1.0,
                       PoiOrigin::baseline});
  }
  return in;
}

}  // namespace hexaccess
