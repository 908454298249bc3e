#pragma once

#include "hexaccess/geo.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hexaccess {

/// Seconds since service-day midnight; may exceed 24 h for trips running past midnight.
using Seconds = std::int32_t;

inline constexpr Seconds kMaxServiceTime = 172800;

/// "HH:MM:SS" with HH allowed to reach 47. Returns nullopt for malformed input.
std::optional<Seconds> parse_gtfs_time(std::string_view text);
std::string format_gtfs_time(Seconds t);

enum class Weekday { monday, tuesday, wednesday, thursday, friday, saturday, sunday };
std::optional<Weekday> parse_weekday(std::string_view name);
std::string_view to_string(Weekday d);

struct Stop {
  std::string id;
  std::string name;
  GeoPoint location;

  friend bool operator==(const Stop&, const Stop&) = default;
};

struct Route {
  std::string id;
  std::string name;
  int mode = 3;  // GTFS route_type

  friend bool operator==(const Route&, const Route&) = default;
};

struct Service {
  std::string id;
  std::array<bool, 7> active{};  // indexed by Weekday
  std::string start_date;
  std::string end_date;

  friend bool operator==(const Service&, const Service&) = default;
};

struct StopTime {
  std::uint32_t stop = 0;  // index into TimetableNetwork::stops
  std::int32_t sequence = 0;
  Seconds arrival = 0;
  Seconds departure = 0;

  friend bool operator==(const StopTime&, const StopTime&) = default;
};

struct Trip {
  std::string id;
  std::uint32_t route = 0;  // index into TimetableNetwork::routes
  std::string service_id;
  std::vector<StopTime> stop_times;  // ordered by sequence

  friend bool operator==(const Trip&, const Trip&) = default;
};

struct Transfer {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  Seconds duration = 0;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};

/// Validated schedule: all references resolved to indices, stop times ordered and monotone.
struct TimetableNetwork {
  std::vector<Stop> stops;
  std::vector<Route> routes;
  std::vector<Service> services;
  std::vector<Trip> trips;
  std::vector<Transfer> transfers;

  std::optional<std::uint32_t> stop_index(std::string_view id) const;
  const Service* service(std::string_view id) const;

  /// Rebuilds the id lookup after stops are edited in place.
  void reindex();

  friend bool operator==(const TimetableNetwork& a, const TimetableNetwork& b);

 private:
  std::unordered_map<std::string, std::uint32_t> stop_index_;
};

/// Reads stops/routes/trips/stop_times/calendar (+ optional transfers) from a GTFS directory.
/// Throws DataError on missing files, dangling references, bad times or non-monotone trips.
TimetableNetwork parse_gtfs(const std::filesystem::path& directory);

/// Validates and indexes an in-memory network (used by parse_gtfs and by fixture builders).
void validate(TimetableNetwork& network);

/// Writes the network back out in the same GTFS subset.
void write_gtfs(const TimetableNetwork& network, const std::filesystem::path& directory);

}  // namespace hexaccess
