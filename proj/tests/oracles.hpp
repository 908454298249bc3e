#pragma once

// Reference implementations the tests compare the library against. They follow the definitions
// directly (nearest centre, full journey enumeration, cell-by-catchment sums, sampling) and share
// no code paths with the optimized versions beyond projection and parsing.

#include "hexaccess/access.hpp"
#include "hexaccess/city.hpp"
#include "hexaccess/config.hpp"
#include "hexaccess/fixture.hpp"
#include "hexaccess/routing.hpp"
#include "hexaccess/scenario.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#ifndef HEXACCESS_DATA_DIR
#error "HEXACCESS_DATA_DIR must point at the repository data directory"
#endif

namespace oracle {

using namespace hexaccess;

inline std::filesystem::path data_dir() { return HEXACCESS_DATA_DIR; }

struct Gridville {
  Config config;
  std::unique_ptr<CityBundle> city;
};

/// Gridville built from the committed fixture files, routed from scratch. Built once per process.
inline const Gridville& gridville() {
  static const Gridville g = [] {
    Gridville out;
    out.config = load_config(data_dir() / "gridville.json");
    out.city = build_city(load_city_inputs(out.config.cities.at(0), out.config), out.config);
    return out;
  }();
  return g;
}

// ---- geometry ------------------------------------------------------------------------------

inline PlanarPoint axial_center(double edge, const HexCellId& c) {
  return {1.5 * edge * c.q, std::sqrt(3.0) * edge * (c.r + c.q / 2.0)};
}

/// Closest cell centre by exhaustive search over a window around a rough guess.
inline HexCellId nearest_center(double edge, const PlanarPoint& p, int reach = 3) {
  const int q0 = static_cast<int>(std::lround(p.x() / (1.5 * edge)));
  const int r0 = static_cast<int>(std::lround(p.y() / (std::sqrt(3.0) * edge) - q0 / 2.0));
  HexCellId best{q0, r0};
  double best_d = std::numeric_limits<double>::infinity();
  for (int dq = -reach; dq <= reach; ++dq) {
    for (int dr = -reach; dr <= reach; ++dr) {
      const HexCellId c{q0 + dq, r0 + dr};
      const double d = (axial_center(edge, c) - p).norm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
  }
  return best;
}

inline double shoelace(const std::vector<PlanarPoint>& ring) {
  double s = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % ring.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

/// Random star-shaped polygon (simple by construction), optionally with one star-shaped hole.
inline Polygon random_polygon(const HexGrid& grid, std::mt19937_64& rng, double max_radius, bool with_hole) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PlanarPoint c(u(rng) * 4000 - 2000, u(rng) * 4000 - 2000);
  const int n = 3 + static_cast<int>(u(rng) * 12);
  // Angles sorted around c with every gap below pi keep the ring star-shaped around c.
  std::vector<double> angles;
  double max_gap = 0;
  do {
    angles.clear();
    for (int i = 0; i < n; ++i) angles.push_back(u(rng) * 2 * kPi);
    std::sort(angles.begin(), angles.end());
    max_gap = angles.front() + 2 * kPi - angles.back();
    for (int i = 1; i < n; ++i) max_gap = std::max(max_gap, angles[static_cast<std::size_t>(i)] - angles[static_cast<std::size_t>(i - 1)]);
  } while (max_gap > 0.9 * kPi);
  std::vector<GeoPoint> ext;
  double min_r = max_radius;
  for (double a : angles) {
    const double r = max_radius * (0.3 + 0.7 * u(rng));
    min_r = std::min(min_r, r);
    ext.push_back(unproject(grid, c + r * PlanarPoint(std::cos(a), std::sin(a))));
  }
  std::vector<std::vector<GeoPoint>> holes;
  if (with_hole) {
    // Every edge stays at least min_r * cos(max_gap / 2) from c.
    const double hr = 0.8 * min_r * std::cos(max_gap / 2);
    std::vector<GeoPoint> hole;
    for (int i = 0; i < 5; ++i) {
      const double a = 2 * kPi * i / 5 + 0.3;
      hole.push_back(unproject(grid, c + hr * (0.5 + 0.5 * u(rng)) * PlanarPoint(std::cos(a), std::sin(a))));
    }
    holes.push_back(std::move(hole));
  }
  return make_polygon(std::move(ext), std::move(holes));
}

/// Per-cell share of `samples` uniform points drawn inside the polygon.
inline std::map<HexCellId, double> monte_carlo_fractions(const HexGrid& grid, const Polygon& poly, int samples,
                                                         std::mt19937_64& rng) {
  PlanarRing ext;
  for (const auto& p : poly.exterior) ext.push_back(project(grid, p));
  std::vector<PlanarRing> holes;
  for (const auto& h : poly.holes) {
    PlanarRing ring;
    for (const auto& p : h) ring.push_back(project(grid, p));
    holes.push_back(std::move(ring));
  }
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : ext) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  std::map<HexCellId, double> counts;
  int accepted = 0;
  while (accepted < samples) {
    const PlanarPoint p(ux(rng), uy(rng));
    if (!contains(ext, p)) continue;
    bool in_hole = false;
    for (const auto& h : holes) in_hole = in_hole || contains(h, p);
    if (in_hole) continue;
    ++accepted;
    counts[nearest_center(grid.edge(), p)] += 1.0;
  }
  for (auto& [cell, v] : counts) v /= samples;
  return counts;
}

// ---- routing -------------------------------------------------------------------------------

/// Earliest arrival per stop index by enumerating every journey: an origin walk, then up to
/// max_transfers + 1 rides, each optionally followed by one footpath. Boarding after a ride (and
/// its footpath) needs transfer_slack_s; the first boarding does not.
inline std::map<std::uint32_t, Seconds> enumerate_journeys(const TimetableNetwork& net, const HexGrid& grid,
                                                           const RouterParams& params, const GeoPoint& origin,
                                                           Seconds depart, Seconds budget) {
  const Seconds limit = depart + budget;
  const std::size_t n = net.stops.size();
  auto walk = [&](double meters) { return static_cast<Seconds>(std::ceil(meters / params.walk_speed_mps - 1e-9)); };

  // footpath[a][b]: seconds, or -1 when there is none
  std::vector<std::vector<Seconds>> foot(n, std::vector<Seconds>(n, -1));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double d = (project(grid, net.stops[a].location) - project(grid, net.stops[b].location)).norm();
      if (d <= params.max_walk_m) foot[a][b] = walk(d);
    }
  }
  for (const auto& t : net.transfers) {
    if (t.from == t.to) continue;
    auto& f = foot[t.from][t.to];
    f = f < 0 ? t.duration : std::min(f, t.duration);
  }

  std::vector<const Trip*> trips;
  for (const auto& t : net.trips) {
    if (params.weekday) {
      const Service* s = net.service(t.service_id);
      if (!s || !s->active[static_cast<std::size_t>(*params.weekday)]) continue;
    }
    trips.push_back(&t);
  }

  std::map<std::uint32_t, Seconds> best;
  auto record = [&](std::uint32_t s, Seconds t) {
    auto [it, fresh] = best.emplace(s, t);
    if (!fresh) it->second = std::min(it->second, t);
  };
  const int max_rides = params.max_transfers + 1;
  // (stop, time, rides so far, last leg was a ride)
  std::set<std::tuple<std::uint32_t, Seconds, int, bool>> seen;
  std::vector<std::tuple<std::uint32_t, Seconds, int, bool>> stack;
  const PlanarPoint o = project(grid, origin);
  for (std::uint32_t s = 0; s < n; ++s) {
    const double d = (project(grid, net.stops[s].location) - o).norm();
    if (d > params.max_walk_m) continue;
    const Seconds t = depart + walk(d);
    if (t > limit) continue;
    record(s, t);
    stack.emplace_back(s, t, 0, false);
  }
  while (!stack.empty()) {
    auto state = stack.back();
    stack.pop_back();
    if (!seen.insert(state).second) continue;
    const auto [s, t, rides, after_ride] = state;
    if (after_ride) {
      for (std::uint32_t b = 0; b < n; ++b) {
        if (foot[s][b] < 0) continue;
        const Seconds ta = t + foot[s][b];
        if (ta > limit) continue;
        record(b, ta);
        stack.emplace_back(b, ta, rides, false);
      }
    }
    if (rides == max_rides) continue;
    const Seconds ready = t + (rides > 0 ? params.transfer_slack_s : 0);
    for (const Trip* trip : trips) {
      const auto& st = trip->stop_times;
      for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].stop != s || st[i].departure < ready) continue;
        for (std::size_t j = i + 1; j < st.size(); ++j) {
          if (st[j].arrival > limit) break;
          record(st[j].stop, st[j].arrival);
          stack.emplace_back(st[j].stop, st[j].arrival, rides + 1, true);
        }
      }
    }
  }
  return best;
}

/// Small random timetable: up to 10 stops in a 3 km square and up to 5 trips, some running past
/// midnight (times of 24:00:00 and later).
inline TimetableNetwork random_timetable(const HexGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(u(rng) * (hi - lo + 1)) % (hi - lo + 1); };
  TimetableNetwork net;
  const int stops = pick(3, 10);
  for (int i = 0; i < stops; ++i) {
    net.stops.push_back({"S" + std::to_string(i), "", unproject(grid, PlanarPoint(u(rng) * 3000, u(rng) * 3000))});
  }
  net.routes.push_back({"R0", "", 3});
  net.routes.push_back({"R1", "", 3});
  net.services.push_back({"all", {true, true, true, true, true, true, true}, "", ""});
  net.services.push_back({"weekend", {false, false, false, false, false, true, true}, "", ""});
  const int trips = pick(1, 5);
  // Share a few stop sequences so some trips fall into the same pattern (and sometimes overtake).
  std::vector<std::vector<std::uint32_t>> sequences;
  for (int k = 0; k < 2; ++k) {
    std::vector<std::uint32_t> all(static_cast<std::size_t>(stops));
    std::iota(all.begin(), all.end(), 0u);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(pick(2, std::min(stops, 6))));
    sequences.push_back(all);
  }
  const Seconds base = u(rng) < 0.4 ? 23 * 3600 + 30 * 60 : 8 * 3600;
  for (int k = 0; k < trips; ++k) {
    std::vector<std::uint32_t> seq;
    if (u(rng) < 0.6) {
      seq = sequences[static_cast<std::size_t>(pick(0, 1))];
    } else {
      std::vector<std::uint32_t> all(static_cast<std::size_t>(stops));
      std::iota(all.begin(), all.end(), 0u);
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(static_cast<std::size_t>(pick(2, std::min(stops, 6))));
      seq = all;
    }
    Trip trip;
    trip.id = "T" + std::to_string(k);
    trip.route = static_cast<std::uint32_t>(k % 2);
    trip.service_id = u(rng) < 0.85 ? "all" : "weekend";
    Seconds clock = base + pick(0, 60) * 60;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const Seconds dwell = pick(0, 2) * 30;
      trip.stop_times.push_back({seq[i], static_cast<std::int32_t>(i + 1), clock, clock + dwell});
      clock += dwell + pick(1, 12) * 60;
    }
    net.trips.push_back(std::move(trip));
  }
  const int transfers = pick(0, 3);
  for (int k = 0; k < transfers; ++k) {
    net.transfers.push_back({static_cast<std::uint32_t>(pick(0, stops - 1)),
                             static_cast<std::uint32_t>(pick(0, stops - 1)), pick(0, 10) * 30});
  }
  validate(net);
  return net;
}

// ---- access --------------------------------------------------------------------------------

struct BruteForceAccess {
  std::map<std::string, double> ratio;  // by POI id
  std::map<HexCellId, double> score;    // every cell of `domain`
};

/// 2SFCA straight from the definition: R_j from raw totals, then every (cell, catchment) pair.
inline BruteForceAccess brute_force_2sfca(std::span<const Poi> pois, std::span<const Catchment> catchments,
                                          const HexDemographics& demo, std::span<const HexCellId> domain) {
  std::map<HexCellId, double> totals;
  for (std::size_t i = 0; i < demo.cells().size(); ++i) {
    totals[demo.cells()[i]] = demo.counts()(0, static_cast<Eigen::Index>(i));
  }
  BruteForceAccess out;
  for (const auto& c : catchments) {
    const Poi* poi = nullptr;
    for (const auto& p : pois) {
      if (p.id == c.poi_id) poi = &p;
    }
    if (!poi) throw std::runtime_error("catchment without POI");
    double pop = 0;
    for (const auto& cell : c.cells) {
      auto it = totals.find(cell);
      if (it != totals.end()) pop += it->second;
    }
    out.ratio[c.poi_id] = pop > 0 ? poi->supply_units / pop : 0.0;
  }
  for (const auto& h : domain) {
    double a = 0;
    for (const auto& c : catchments) {
      for (const auto& cell : c.cells) {
        if (cell == h) a += out.ratio[c.poi_id];
      }
    }
    out.score[h] = a;
  }
  return out;
}

inline double relative_error(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Random small access instance: a patch of populated cells, a few catchments over it (partly
/// spilling onto unpopulated cells) and POIs with random supply.
struct AccessInstance {
  HexDemographics demo;
  std::vector<Poi> pois;
  std::vector<Catchment> catchments;
};

inline AccessInstance random_access_instance(std::mt19937_64& rng, int max_pois = 8) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DemographicSchema schema;
  std::map<HexCellId, DemographicVector<>> cells;
  const int side = 4 + static_cast<int>(u(rng) * 6);
  for (int q = 0; q < side; ++q) {
    for (int r = 0; r < side; ++r) {
      if (u(rng) < 0.15) continue;
      DemographicVector<> v = DemographicVector<>::Zero(schema.size());
      const double total = u(rng) < 0.1 ? 0.0 : std::floor(u(rng) * 500);
      v(0) = total;
      for (auto d : kGroupDimensions) {
        const auto n = static_cast<Eigen::Index>(schema.brackets(d).size());
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng) < 0.2 ? 0.0 : u(rng);
        if (w.sum() == 0) w(0) = 1;
        v.segment(schema.offset(d), n) = w * (total / w.sum());
      }
      cells[{q, r}] = v;
    }
  }
  AccessInstance out;
  out.demo = HexDemographics::from_map(schema, cells);
  const int n = 1 + static_cast<int>(u(rng) * max_pois);
  for (int j = 0; j < n; ++j) {
    char id[16];
    std::snprintf(id, sizeof id, "p%02d", j);
    out.pois.push_back({id, PoiCategory::grocery, id, {}, 0.25 + 4 * u(rng), PoiOrigin::baseline});
    Catchment c{id, PoiCategory::grocery, WindowLabel::morning, 1800, {}};
    const int q0 = static_cast<int>(u(rng) * side), r0 = static_cast<int>(u(rng) * side);
    const int radius = static_cast<int>(u(rng) * 4);
    for (int dq = -radius; dq <= radius; ++dq) {
      for (int dr = -radius; dr <= radius; ++dr) {
        if (std::abs(dq + dr) <= radius && u(rng) < 0.9) c.cells.push_back({q0 + dq, r0 + dr});
      }
    }
    if (c.cells.empty()) c.cells.push_back({q0, r0});
    std::sort(c.cells.begin(), c.cells.end());
    out.catchments.push_back(std::move(c));
  }
  return out;
}

inline std::vector<SupplyRatio> ratios_for(const AccessInstance& inst) {
  std::vector<SupplyRatio> out;
  for (std::size_t j = 0; j < inst.pois.size(); ++j) out.push_back(supply_ratio(inst.pois[j], inst.catchments[j], inst.demo));
  return out;
}

// ---- scenarios -----------------------------------------------------------------------------

/// Random scenario for one category of a city: up to 3 adds inside the extent, up to 3 removals.
inline Scenario random_scenario(const CityBundle& city, PoiCategory category, std::mt19937_64& rng, int serial) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scenario s;
  s.id = "random-" + std::to_string(serial);
  s.city = city.id;
  const int adds = static_cast<int>(u(rng) * 4);
  for (int k = 0; k < adds; ++k) {
    const GeoPoint at{city.extent.min_lat + u(rng) * (city.extent.max_lat - city.extent.min_lat),
                      city.extent.min_lon + u(rng) * (city.extent.max_lon - city.extent.min_lon)};
    s.added.push_back({"new" + std::to_string(serial) + "_" + std::to_string(k), category, "hypothetical", at,
                       u(rng) < 0.5 ? 1.0 : 0.5 + 3 * u(rng), PoiOrigin::scenario});
  }
  std::vector<std::string> ids;
  for (const auto& p : city.pois) {
    if (p.category == category) ids.push_back(p.id);
  }
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto removes = std::min<std::size_t>(ids.size(), static_cast<std::size_t>(u(rng) * 4));
  for (std::size_t k = 0; k < removes; ++k) s.removed.insert(ids[k]);
  return s;
}

/// The from-scratch pipeline over the scenario's POI set.
inline BaselineState full_recompute(const CityBundle& city, const BaselineState& base, const Scenario& s) {
  const auto pois = scenario_pois(base, s);
  return build_baseline(city.id, base.category, base.window, pois, *city.router, city.demo, city.keep(), base.budget_s,
                        base.sample_interval_s);
}

inline bool bit_identical(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  return a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace oracle
