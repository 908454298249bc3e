#include "hexaccess/timetable.hpp"

#include "hexaccess/csv.hpp"
#include "hexaccess/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace hexaccess {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames = {"monday", "tuesday", "wednesday", "thursday",
                                                           "friday", "saturday", "sunday"};

std::string where(const CsvTable& t, std::size_t row) { return t.source() + ":" + std::to_string(t.line(row)); }

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Stop parse_stop(const CsvTable& t, std::size_t row, std::size_t c_id, std::size_t c_lat, std::size_t c_lon,
                std::optional<std::size_t> c_name) {
  Stop s;
  s.id = trim(t.field(row, c_id));
  if (s.id.empty()) throw DataError(where(t, row) + ": empty stop_id");
  if (c_name) s.name = std::string(t.field(row, *c_name));
  auto lat = parse_double(t.field(row, c_lat));
  auto lon = parse_double(t.field(row, c_lon));
  if (!lat || !lon) throw DataError(where(t, row) + ": stop " + s.id + " has malformed coordinates");
  s.location = {*lat, *lon};
  try {
    validate(s.location);
  } catch (const DomainError& e) {
    throw DataError(where(t, row) + ": stop " + s.id + ": " + e.what());
  }
  return s;
}

std::filesystem::path require_file(const std::filesystem::path& dir, std::string_view name) {
  auto p = dir / name;
  if (!std::filesystem::is_regular_file(p)) throw DataError("GTFS feed is missing required file " + p.string());
  return p;
}

}  // namespace

std::optional<Seconds> parse_gtfs_time(std::string_view text) {
  const std::string t = trim(text);
  const auto c1 = t.find(':');
  if (c1 == std::string::npos) return std::nullopt;
  const auto c2 = t.find(':', c1 + 1);
  if (c2 == std::string::npos || t.size() - c2 - 1 != 2 || c2 - c1 - 1 != 2 || c1 == 0 || c1 > 2) {
    return std::nullopt;
  }
  int h = 0, m = 0, s = 0;
  auto num = [&](std::size_t from, std::size_t to, int& out) {
    auto [ptr, ec] = std::from_chars(t.data() + from, t.data() + to, out);
    return ec == std::errc{} && ptr == t.data() + to;
  };
  if (!num(0, c1, h) || !num(c1 + 1, c2, m) || !num(c2 + 1, t.size(), s)) return std::nullopt;
  if (h < 0 || m < 0 || m > 59 || s < 0 || s > 59) return std::nullopt;
  const Seconds total = h * 3600 + m * 60 + s;
  if (total >= kMaxServiceTime) return std::nullopt;
  return total;
}

std::string format_gtfs_time(Seconds t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", t / 3600, (t / 60) % 60, t % 60);
  return buf;
}

std::optional<Weekday> parse_weekday(std::string_view name) {
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    if (kWeekdayNames[i] == name) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Weekday d) { return kWeekdayNames[static_cast<std::size_t>(d)]; }

std::optional<std::uint32_t> TimetableNetwork::stop_index(std::string_view id) const {
  auto it = stop_index_.find(std::string(id));
  if (it == stop_index_.end()) return std::nullopt;
  return it->second;
}

const Service* TimetableNetwork::service(std::string_view id) const {
  for (const auto& s : services) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

void TimetableNetwork::reindex() {
  stop_index_.clear();
  for (std::uint32_t i = 0; i < stops.size(); ++i) {
    if (!stop_index_.emplace(stops[i].id, i).second) throw DataError("duplicate stop_id " + stops[i].id);
  }
}

bool operator==(const TimetableNetwork& a, const TimetableNetwork& b) {
  return a.stops == b.stops && a.routes == b.routes && a.services == b.services && a.trips == b.trips &&
         a.transfers == b.transfers;
}

void validate(TimetableNetwork& network) {
  network.reindex();
  std::set<std::string> ids;
  for (const auto& r : network.routes) {
    if (!ids.insert(r.id).second) throw DataError("duplicate route_id " + r.id);
  }
  ids.clear();
  for (const auto& s : network.services) {
    if (!ids.insert(s.id).second) throw DataError("duplicate service_id " + s.id);
  }
  std::set<std::string> trip_ids;
  for (auto& trip : network.trips) {
    if (!trip_ids.insert(trip.id).second) throw DataError("duplicate trip_id " + trip.id);
    if (trip.route >= network.routes.size()) throw DataError("trip " + trip.id + " references a missing route");
    if (!ids.count(trip.service_id)) {
      throw DataError("trip " + trip.id + " references missing service_id " + trip.service_id);
    }
    if (trip.stop_times.size() < 2) throw DataError("trip " + trip.id + " has fewer than two stop times");
    std::sort(trip.stop_times.begin(), trip.stop_times.end(),
              [](const StopTime& a, const StopTime& b) { return a.sequence < b.sequence; });
    for (std::size_t i = 0; i < trip.stop_times.size(); ++i) {
      const auto& st = trip.stop_times[i];
      if (st.stop >= network.stops.size()) throw DataError("trip " + trip.id + " references a missing stop");
      if (st.arrival < 0 || st.departure >= kMaxServiceTime || st.arrival > st.departure) {
        throw DataError("trip " + trip.id + " has invalid times at stop_sequence " + std::to_string(st.sequence));
      }
      if (i > 0) {
        const auto& prev = trip.stop_times[i - 1];
        if (prev.sequence == st.sequence) {
          throw DataError("trip " + trip.id + " repeats stop_sequence " + std::to_string(st.sequence));
        }
        if (st.arrival < prev.departure) {
          throw DataError("trip " + trip.id + " goes back in time at stop_sequence " + std::to_string(st.sequence) +
                          " (" + format_gtfs_time(prev.departure) + " then " + format_gtfs_time(st.arrival) + ")");
        }
      }
    }
  }
  for (const auto& tr : network.transfers) {
    if (tr.from >= network.stops.size() || tr.to >= network.stops.size() || tr.duration < 0) {
      throw DataError("invalid transfer entry");
    }
  }
}

TimetableNetwork parse_gtfs(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) throw DataError("GTFS directory not found: " + directory.string());
  const auto stops_t = CsvTable::read(require_file(directory, "stops.txt"));
  const auto routes_t = CsvTable::read(require_file(directory, "routes.txt"));
  const auto trips_t = CsvTable::read(require_file(directory, "trips.txt"));
  const auto times_t = CsvTable::read(require_file(directory, "stop_times.txt"));
  const auto cal_t = CsvTable::read(require_file(directory, "calendar.txt"));

  TimetableNetwork net;

  {
    const auto c_id = stops_t.require_column("stop_id");
    const auto c_lat = stops_t.require_column("stop_lat");
    const auto c_lon = stops_t.require_column("stop_lon");
    const auto c_name = stops_t.column("stop_name");
    for (std::size_t i = 0; i < stops_t.size(); ++i) {
      net.stops.push_back(parse_stop(stops_t, i, c_id, c_lat, c_lon, c_name));
    }
    net.reindex();
  }

  std::unordered_map<std::string, std::uint32_t> route_index;
  {
    const auto c_id = routes_t.require_column("route_id");
    const auto c_short = routes_t.column("route_short_name");
    const auto c_long = routes_t.column("route_long_name");
    const auto c_type = routes_t.require_column("route_type");
    for (std::size_t i = 0; i < routes_t.size(); ++i) {
      Route r;
      r.id = trim(routes_t.field(i, c_id));
      if (c_short) r.name = std::string(routes_t.field(i, *c_short));
      if (r.name.empty() && c_long) r.name = std::string(routes_t.field(i, *c_long));
      auto mode = parse_double(routes_t.field(i, c_type));
      if (!mode || *mode < 0 || *mode != static_cast<int>(*mode)) {
        throw DataError(where(routes_t, i) + ": malformed route_type");
      }
      r.mode = static_cast<int>(*mode);
      if (!route_index.emplace(r.id, static_cast<std::uint32_t>(net.routes.size())).second) {
        throw DataError(where(routes_t, i) + ": duplicate route_id " + r.id);
      }
      net.routes.push_back(std::move(r));
    }
  }

  {
    const auto c_id = cal_t.require_column("service_id");
    std::array<std::size_t, 7> c_day{};
    for (std::size_t d = 0; d < 7; ++d) c_day[d] = cal_t.require_column(kWeekdayNames[d]);
    const auto c_start = cal_t.column("start_date");
    const auto c_end = cal_t.column("end_date");
    for (std::size_t i = 0; i < cal_t.size(); ++i) {
      Service s;
      s.id = trim(cal_t.field(i, c_id));
      for (std::size_t d = 0; d < 7; ++d) {
        const auto v = trim(cal_t.field(i, c_day[d]));
        if (v != "0" && v != "1") throw DataError(where(cal_t, i) + ": weekday flag must be 0 or 1");
        s.active[d] = v == "1";
      }
      if (c_start) s.start_date = trim(cal_t.field(i, *c_start));
      if (c_end) s.end_date = trim(cal_t.field(i, *c_end));
      net.services.push_back(std::move(s));
    }
  }

  std::unordered_map<std::string, std::uint32_t> trip_index;
  {
    const auto c_route = trips_t.require_column("route_id");
    const auto c_service = trips_t.require_column("service_id");
    const auto c_trip = trips_t.require_column("trip_id");
    for (std::size_t i = 0; i < trips_t.size(); ++i) {
      Trip t;
      t.id = trim(trips_t.field(i, c_trip));
      const auto route_id = trim(trips_t.field(i, c_route));
      auto r = route_index.find(route_id);
      if (r == route_index.end()) {
        throw DataError(where(trips_t, i) + ": trip " + t.id + " references missing route_id " + route_id);
      }
      t.route = r->second;
      t.service_id = trim(trips_t.field(i, c_service));
      if (!net.service(t.service_id)) {
        throw DataError(where(trips_t, i) + ": trip " + t.id + " references missing service_id " + t.service_id);
      }
      if (!trip_index.emplace(t.id, static_cast<std::uint32_t>(net.trips.size())).second) {
        throw DataError(where(trips_t, i) + ": duplicate trip_id " + t.id);
      }
      net.trips.push_back(std::move(t));
    }
  }

  {
    const auto c_trip = times_t.require_column("trip_id");
    const auto c_arr = times_t.require_column("arrival_time");
    const auto c_dep = times_t.require_column("departure_time");
    const auto c_stop = times_t.require_column("stop_id");
    const auto c_seq = times_t.require_column("stop_sequence");
    for (std::size_t i = 0; i < times_t.size(); ++i) {
      const auto trip_id = trim(times_t.field(i, c_trip));
      auto t = trip_index.find(trip_id);
      if (t == trip_index.end()) {
        throw DataError(where(times_t, i) + ": stop time references missing trip_id " + trip_id);
      }
      const auto stop_id = trim(times_t.field(i, c_stop));
      auto s = net.stop_index(stop_id);
      if (!s) {
        throw DataError(where(times_t, i) + ": trip " + trip_id + " references missing stop_id " + stop_id);
      }
      const auto arr_text = trim(times_t.field(i, c_arr));
      const auto dep_text = trim(times_t.field(i, c_dep));
      if (arr_text.empty() && dep_text.empty()) {
        throw DataError(where(times_t, i) + ": untimed stop times are not supported (trip " + trip_id + ")");
      }
      auto arr = parse_gtfs_time(arr_text.empty() ? dep_text : arr_text);
      auto dep = parse_gtfs_time(dep_text.empty() ? arr_text : dep_text);
      if (!arr || !dep) throw DataError(where(times_t, i) + ": malformed time in row " + std::to_string(i + 2));
      auto seq = parse_double(times_t.field(i, c_seq));
      if (!seq || *seq < 0 || *seq != static_cast<std::int32_t>(*seq)) {
        throw DataError(where(times_t, i) + ": malformed stop_sequence");
      }
      net.trips[t->second].stop_times.push_back({*s, static_cast<std::int32_t>(*seq), *arr, *dep});
    }
  }

  const auto transfers_path = directory / "transfers.txt";
  if (std::filesystem::is_regular_file(transfers_path)) {
    const auto tr_t = CsvTable::read(transfers_path);
    const auto c_from = tr_t.require_column("from_stop_id");
    const auto c_to = tr_t.require_column("to_stop_id");
    const auto c_type = tr_t.column("transfer_type");
    const auto c_min = tr_t.column("min_transfer_time");
    for (std::size_t i = 0; i < tr_t.size(); ++i) {
      const auto from_id = trim(tr_t.field(i, c_from));
      const auto to_id = trim(tr_t.field(i, c_to));
      auto from = net.stop_index(from_id);
      auto to = net.stop_index(to_id);
      if (!from || !to) {
        throw DataError(where(tr_t, i) + ": transfer references missing stop " + (from ? to_id : from_id));
      }
      // type 3 marks an impossible transfer
      if (c_type && trim(tr_t.field(i, *c_type)) == "3") continue;
      Seconds duration = 0;
      if (c_min && !trim(tr_t.field(i, *c_min)).empty()) {
        auto v = parse_double(tr_t.field(i, *c_min));
        if (!v || *v < 0) throw DataError(where(tr_t, i) + ": malformed min_transfer_time");
        duration = static_cast<Seconds>(*v);
      }
      net.transfers.push_back({*from, *to, duration});
    }
  }

  for (const auto& trip : net.trips) {
    if (trip.stop_times.empty()) throw DataError("trip " + trip.id + " has no stop times");
  }
  validate(net);
  return net;
}

void write_gtfs(const TimetableNetwork& network, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto open = [&](std::string_view name) {
    std::ofstream out(directory / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (directory / name).string());
    return out;
  };
  {
    auto out = open("stops.txt");
    out << "stop_id,stop_name,stop_lat,stop_lon\n";
    for (const auto& s : network.stops) {
      out << csv_escape(s.id) << ',' << csv_escape(s.name) << ',' << format_double(s.location.lat) << ','
          << format_double(s.location.lon) << '\n';
    }
  }
  {
    auto out = open("routes.txt");
    out << "route_id,route_short_name,route_type\n";
    for (const auto& r : network.routes) out << csv_escape(r.id) << ',' << csv_escape(r.name) << ',' << r.mode << '\n';
  }
  {
    auto out = open("calendar.txt");
    out << "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n";
    for (const auto& s : network.services) {
      out << csv_escape(s.id);
      for (bool a : s.active) out << ',' << (a ? '1' : '0');
      out << ',' << s.start_date << ',' << s.end_date << '\n';
    }
  }
  {
    auto out = open("trips.txt");
    out << "route_id,service_id,trip_id\n";
    for (const auto& t : network.trips) {
      out << csv_escape(network.routes[t.route].id) << ',' << csv_escape(t.service_id) << ',' << csv_escape(t.id)
          << '\n';
    }
  }
  {
    auto out = open("stop_times.txt");
    out << "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
    for (const auto& t : network.trips) {
      for (const auto& st : t.stop_times) {
        out << csv_escape(t.id) << ',' << format_gtfs_time(st.arrival) << ',' << format_gtfs_time(st.departure) << ','
            << csv_escape(network.stops[st.stop].id) << ',' << st.sequence << '\n';
      }
    }
  }
  const auto transfers_path = directory / "transfers.txt";
  if (!network.transfers.empty()) {
    auto out = open("transfers.txt");
    out << "from_stop_id,to_stop_id,transfer_type,min_transfer_time\n";
    for (const auto& tr : network.transfers) {
      out << csv_escape(network.stops[tr.from].id) << ',' << csv_escape(network.stops[tr.to].id) << ",2,"
          << tr.duration << '\n';
    }
  } else if (std::filesystem::exists(transfers_path)) {
    std::filesystem::remove(transfers_path);
  }
}

}  // namespace hexaccess
