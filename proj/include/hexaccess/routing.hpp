#pragma once

#include "hexaccess/hexgrid.hpp"
#include "hexaccess/poi.hpp"
#include "hexaccess/timetable.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hexaccess {

enum class WindowLabel { morning, afternoon, evening };

std::string_view to_string(WindowLabel w);
std::optional<WindowLabel> parse_window(std::string_view name);

struct TimeWindow {
  WindowLabel label = WindowLabel::morning;
  Seconds start = 0;
  Seconds end = 0;
};

/// 07-09, 12-14 and 17-19.
TimeWindow default_window(WindowLabel label);

struct RouterParams {
  double walk_speed_mps = 1.4;
  double max_walk_m = 800.0;
  Seconds transfer_slack_s = 60;
  /// Transfers between vehicles; journeys use at most max_transfers + 1 rides.
  int max_transfers = 3;
  /// Trips whose service is inactive on this weekday are dropped. Unset keeps every trip.
  std::optional<Weekday> weekday;
};

struct Footpath {
  std::uint32_t to = 0;
  Seconds duration = 0;

  friend bool operator==(const Footpath&, const Footpath&) = default;
};

struct StopArrival {
  std::uint32_t stop = 0;
  Seconds arrival = 0;

  friend bool operator==(const StopArrival&, const StopArrival&) = default;
};

/// Whole seconds needed to walk `meters`, rounded up.
Seconds walk_seconds(double meters, double speed_mps);

/// Immutable routing structures over one service day: trips grouped into patterns that share a
/// stop sequence and never overtake each other, plus stop-to-stop footpaths.
class Router {
 public:
  Router(const TimetableNetwork& network, const HexGrid& grid, RouterParams params = {});

  const RouterParams& params() const noexcept { return params_; }
  const HexGrid& grid() const noexcept { return grid_; }
  std::size_t stop_count() const noexcept { return stops_.size(); }
  const Stop& stop(std::uint32_t i) const { return stops_[i]; }
  const PlanarPoint& stop_position(std::uint32_t i) const { return positions_[i]; }
  std::optional<std::uint32_t> stop_index(std::string_view id) const;
  std::span<const Footpath> footpaths(std::uint32_t stop) const { return footpaths_[stop]; }
  std::size_t pattern_count() const noexcept { return patterns_.size(); }

  /// Stops within `radius_m` of a planar point with their distances, sorted by stop index.
  std::vector<std::pair<std::uint32_t, double>> stops_near(const PlanarPoint& xy, double radius_m) const;

 private:
  struct Pattern {
    std::vector<std::uint32_t> stops;
    // trip-major: times[trip * stops.size() + position]
    std::vector<Seconds> arrivals;
    std::vector<Seconds> departures;
    std::size_t trips = 0;
  };
  struct PatternVisit {
    std::uint32_t pattern;
    std::uint32_t position;
  };

  std::int64_t bucket_key(std::int64_t bx, std::int64_t by) const { return (bx << 32) ^ (by & 0xffffffff); }

  RouterParams params_;
  HexGrid grid_;
  std::vector<Stop> stops_;
  std::vector<PlanarPoint> positions_;
  std::vector<std::vector<Footpath>> footpaths_;
  std::vector<Pattern> patterns_;
  std::vector<std::vector<PatternVisit>> visits_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
  double bucket_m_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets_;

  friend std::vector<StopArrival> earliest_arrivals(const Router&, const GeoPoint&, Seconds, Seconds);
};

/// Exact earliest arrival at every stop reachable from `origin` by walking (up to max_walk_m) and
/// riding, departing at `depart_s`. Only arrivals <= depart_s + budget_s are returned, sorted by stop.
/// The first boarding needs no slack; every later boarding needs transfer_slack_s after arriving.
std::vector<StopArrival> earliest_arrivals(const Router& router, const GeoPoint& origin, Seconds depart_s,
                                           Seconds budget_s);

/// Same result keyed by stop id.
std::map<std::string, Seconds> earliest_arrivals_by_id(const Router& router, const GeoPoint& origin, Seconds depart_s,
                                                       Seconds budget_s);

inline constexpr Seconds kDefaultBudget = 1800;
inline constexpr Seconds kDefaultSampleInterval = 1800;

struct Catchment {
  std::string poi_id;
  PoiCategory category = PoiCategory::vaccination_center;
  WindowLabel window = WindowLabel::morning;
  Seconds budget_s = kDefaultBudget;
  std::vector<HexCellId> cells;  // sorted, unique

  friend bool operator==(const Catchment&, const Catchment&) = default;
};

/// Union over departures sampled every `sample_interval_s` from window.start through window.end of
/// the walk disk around the POI and the remaining-time walk disks around every reached stop.
Catchment compute_catchment(const Router& router, const Poi& poi, const TimeWindow& window,
                            Seconds budget_s = kDefaultBudget, Seconds sample_interval_s = kDefaultSampleInterval);

struct CatchmentError {
  std::string poi_id;
  WindowLabel window;
  std::string message;
};

struct CatchmentBatch {
  std::vector<Catchment> catchments;  // ordered by (poi id, window label)
  std::vector<CatchmentError> errors;
};

/// Every (POI, window) pair, computed on `threads` workers (0 = hardware concurrency).
CatchmentBatch catchment_batch(const Router& router, std::span<const Poi> pois, std::span<const TimeWindow> windows,
                               Seconds budget_s = kDefaultBudget, Seconds sample_interval_s = kDefaultSampleInterval,
                               unsigned threads = 0);

}  // namespace hexaccess
