#include "hexaccess/routing.hpp"

#include "hexaccess/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace hexaccess {

namespace {

constexpr Seconds kUnreached = std::numeric_limits<Seconds>::max();
constexpr std::array<std::string_view, 3> kWindowNames = {"morning", "afternoon", "evening"};

}  // namespace

std::string_view to_string(WindowLabel w) { return kWindowNames[static_cast<std::size_t>(w)]; }

std::optional<WindowLabel> parse_window(std::string_view name) {
  for (std::size_t i = 0; i < kWindowNames.size(); ++i) {
    if (kWindowNames[i] == name) return static_cast<WindowLabel>(i);
  }
  return std::nullopt;
}

TimeWindow default_window(WindowLabel label) {
  switch (label) {
    case WindowLabel::morning: return {label, 7 * 3600, 9 * 3600};
    case WindowLabel::afternoon: return {label, 12 * 3600, 14 * 3600};
    case WindowLabel::evening: return {label, 17 * 3600, 19 * 3600};
  }
  return {label, 0, 0};
}

Seconds walk_seconds(double meters, double speed_mps) {
  return static_cast<Seconds>(std::ceil(meters / speed_mps - 1e-9));
}

Router::Router(const TimetableNetwork& network, const HexGrid& grid, RouterParams params)
    : params_(params), grid_(grid), stops_(network.stops), bucket_m_(std::max(params.max_walk_m, 1.0)) {
  if (!(params_.walk_speed_mps > 0.0)) throw DomainError("walk speed must be positive");
  if (!(params_.max_walk_m >= 0.0)) throw DomainError("max walk distance must be non-negative");
  if (params_.transfer_slack_s < 0 || params_.max_transfers < 0) throw DomainError("negative routing parameter");

  const auto n = static_cast<std::uint32_t>(stops_.size());
  positions_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    positions_.push_back(project(grid_, stops_[i].location));
    index_.emplace(stops_[i].id, i);
    const auto bx = static_cast<std::int64_t>(std::floor(positions_[i].x() / bucket_m_));
    const auto by = static_cast<std::int64_t>(std::floor(positions_[i].y() / bucket_m_));
    buckets_[bucket_key(bx, by)].push_back(i);
  }

  // footpaths: crow-flies pairs within max_walk_m, then explicit transfers keep the shorter duration
  footpaths_.assign(n, {});
  std::vector<std::map<std::uint32_t, Seconds>> paths(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [j, dist] : stops_near(positions_[i], params_.max_walk_m)) {
      if (j != i) paths[i][j] = walk_seconds(dist, params_.walk_speed_mps);
    }
  }
  for (const auto& tr : network.transfers) {
    if (tr.from == tr.to) continue;
    auto [it, inserted] = paths[tr.from].try_emplace(tr.to, tr.duration);
    if (!inserted) it->second = std::min(it->second, tr.duration);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [j, d] : paths[i]) footpaths_[i].push_back({j, d});
  }

  // group active trips by (route, stop sequence), ordered by first departure
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::vector<const Trip*>> groups;
  for (const auto& trip : network.trips) {
    if (params_.weekday) {
      const Service* service = network.service(trip.service_id);
      if (!service || !service->active[static_cast<std::size_t>(*params_.weekday)]) continue;
    }
    std::vector<std::uint32_t> sequence;
    sequence.reserve(trip.stop_times.size());
    for (const auto& st : trip.stop_times) sequence.push_back(st.stop);
    groups[{trip.route, std::move(sequence)}].push_back(&trip);
  }

  for (auto& [key, trips] : groups) {
    std::stable_sort(trips.begin(), trips.end(), [](const Trip* a, const Trip* b) {
      if (a->stop_times.front().departure != b->stop_times.front().departure) {
        return a->stop_times.front().departure < b->stop_times.front().departure;
      }
      return a->id < b->id;
    });
    // first-fit split into chains where each trip is no earlier than its predecessor at every stop
    std::vector<std::vector<const Trip*>> chains;
    for (const Trip* trip : trips) {
      bool placed = false;
      for (auto& chain : chains) {
        const Trip* last = chain.back();
        bool fifo = true;
        for (std::size_t p = 0; p < trip->stop_times.size() && fifo; ++p) {
          fifo = last->stop_times[p].arrival <= trip->stop_times[p].arrival &&
                 last->stop_times[p].departure <= trip->stop_times[p].departure;
        }
        if (fifo) {
          chain.push_back(trip);
          placed = true;
          break;
        }
      }
      if (!placed) chains.push_back({trip});
    }
    for (const auto& chain : chains) {
      Pattern pattern;
      pattern.stops = key.second;
      pattern.trips = chain.size();
      for (const Trip* trip : chain) {
        for (const auto& st : trip->stop_times) {
          pattern.arrivals.push_back(st.arrival);
          pattern.departures.push_back(st.departure);
        }
      }
      patterns_.push_back(std::move(pattern));
    }
  }

  visits_.assign(n, {});
  for (std::uint32_t p = 0; p < patterns_.size(); ++p) {
    const auto& stops = patterns_[p].stops;
    for (std::uint32_t pos = 0; pos < stops.size(); ++pos) visits_[stops[pos]].push_back({p, pos});
  }
}

std::optional<std::uint32_t> Router::stop_index(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::uint32_t, double>> Router::stops_near(const PlanarPoint& xy, double radius_m) const {
  std::vector<std::pair<std::uint32_t, double>> out;
  const auto span = static_cast<std::int64_t>(std::ceil(radius_m / bucket_m_));
  const auto bx = static_cast<std::int64_t>(std::floor(xy.x() / bucket_m_));
  const auto by = static_cast<std::int64_t>(std::floor(xy.y() / bucket_m_));
  for (std::int64_t dx = -span; dx <= span; ++dx) {
    for (std::int64_t dy = -span; dy <= span; ++dy) {
      auto it = buckets_.find(bucket_key(bx + dx, by + dy));
      if (it == buckets_.end()) continue;
      for (std::uint32_t s : it->second) {
        const double d = (positions_[s] - xy).norm();
        if (d <= radius_m) out.emplace_back(s, d);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StopArrival> earliest_arrivals(const Router& router, const GeoPoint& origin, Seconds depart_s,
                                           Seconds budget_s) {
  if (budget_s < 0) throw DomainError("budget must be non-negative");
  const auto& params = router.params_;
  const Seconds limit = depart_s + budget_s;
  const std::size_t n = router.stops_.size();

  std::vector<Seconds> best(n, kUnreached);
  // walk_label: reached on foot from the origin; ride labels: best arrival after at least one ride
  std::vector<Seconds> walk_label(n, kUnreached);
  std::vector<Seconds> prev(n, kUnreached);
  std::vector<Seconds> cur(n, kUnreached);
  // arrivals whose last leg is a ride; footpaths may only follow a ride
  std::vector<Seconds> ride_best(n, kUnreached);
  std::vector<std::uint32_t> marked;
  std::vector<char> is_marked(n, 0);

  for (const auto& [s, dist] : router.stops_near(project(router.grid_, origin), params.max_walk_m)) {
    const Seconds t = depart_s + walk_seconds(dist, params.walk_speed_mps);
    if (t > limit) continue;
    walk_label[s] = t;
    best[s] = t;
    marked.push_back(s);
  }

  std::vector<std::uint32_t> queue_start(router.patterns_.size(), std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint32_t> queued;
  std::vector<std::uint32_t> ridden;

  const int max_rounds = params.max_transfers + 1;
  for (int round = 1; round <= max_rounds && !marked.empty(); ++round) {
    const bool first = round == 1;
    const std::vector<Seconds>& board = first ? walk_label : prev;
    const Seconds slack = first ? 0 : params.transfer_slack_s;

    queued.clear();
    for (std::uint32_t s : marked) {
      for (const auto& visit : router.visits_[s]) {
        auto& start = queue_start[visit.pattern];
        if (start == std::numeric_limits<std::uint32_t>::max()) queued.push_back(visit.pattern);
        start = std::min(start, visit.position);
      }
    }
    std::sort(queued.begin(), queued.end());

    ridden.clear();
    for (std::uint32_t p : queued) {
      const auto& pattern = router.patterns_[p];
      const std::size_t width = pattern.stops.size();
      std::size_t trip = pattern.trips;  // none
      for (std::size_t pos = queue_start[p]; pos < width; ++pos) {
        const std::uint32_t s = pattern.stops[pos];
        if (trip < pattern.trips) {
          const Seconds a = pattern.arrivals[trip * width + pos];
          if (a <= limit && a < ride_best[s]) {
            if (!is_marked[s]) {
              ridden.push_back(s);
              is_marked[s] = 1;
            }
            ride_best[s] = a;
            cur[s] = std::min(cur[s], a);
          }
        }
        if (board[s] == kUnreached) continue;
        const Seconds ready = board[s] + slack;
        if (trip < pattern.trips && ready > pattern.departures[trip * width + pos]) continue;
        // earliest trip departing at or after `ready`; trips are ordered at every position
        std::size_t lo = 0, hi = trip < pattern.trips ? trip : pattern.trips;
        while (lo < hi) {
          const std::size_t mid = (lo + hi) / 2;
          if (pattern.departures[mid * width + pos] >= ready) {
            hi = mid;
          } else {
            lo = mid + 1;
          }
        }
        if (lo < pattern.trips && pattern.departures[lo * width + pos] >= ready) trip = lo;
      }
      queue_start[p] = std::numeric_limits<std::uint32_t>::max();
    }

    // one footpath hop from each stop reached by riding this round
    for (std::uint32_t s : ridden) {
      for (const auto& fp : router.footpaths_[s]) {
        const Seconds t = ride_best[s] + fp.duration;
        if (t <= limit && t < cur[fp.to]) cur[fp.to] = t;
      }
    }

    marked.clear();
    for (std::size_t s = 0; s < n; ++s) {
      if (cur[s] < prev[s]) {
        marked.push_back(static_cast<std::uint32_t>(s));
        best[s] = std::min(best[s], cur[s]);
      }
    }
    for (std::uint32_t s : ridden) is_marked[s] = 0;
    prev = cur;
  }

  std::vector<StopArrival> out;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (best[s] <= limit) out.push_back({s, best[s]});
  }
  return out;
}

std::map<std::string, Seconds> earliest_arrivals_by_id(const Router& router, const GeoPoint& origin, Seconds depart_s,
                                                       Seconds budget_s) {
  std::map<std::string, Seconds> out;
  for (const auto& a : earliest_arrivals(router, origin, depart_s, budget_s)) out[router.stop(a.stop).id] = a.arrival;
  return out;
}

Catchment compute_catchment(const Router& router, const Poi& poi, const TimeWindow& window, Seconds budget_s,
                            Seconds sample_interval_s) {
  if (budget_s < 0) throw DomainError("budget must be non-negative");
  if (window.start >= window.end) throw DomainError("time window must have start < end");
  if (sample_interval_s <= 0) throw DomainError("sample interval must be positive");
  const auto& params = router.params();
  const HexGrid& grid = router.grid();
  const PlanarPoint origin = project(grid, poi.location);

  std::vector<HexCellId> cells =
      disk_cells(grid, origin, std::min(budget_s * params.walk_speed_mps, params.max_walk_m));
  for (Seconds depart = window.start; depart <= window.end; depart += sample_interval_s) {
    for (const auto& a : earliest_arrivals(router, poi.location, depart, budget_s)) {
      const Seconds remaining = budget_s - (a.arrival - depart);
      const double radius = std::min(remaining * params.walk_speed_mps, params.max_walk_m);
      const auto disk = disk_cells(grid, router.stop_position(a.stop), radius);
      cells.insert(cells.end(), disk.begin(), disk.end());
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return {poi.id, poi.category, window.label, budget_s, std::move(cells)};
}

CatchmentBatch catchment_batch(const Router& router, std::span<const Poi> pois, std::span<const TimeWindow> windows,
                               Seconds budget_s, Seconds sample_interval_s, unsigned threads) {
  std::vector<const Poi*> ordered;
  for (const auto& p : pois) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const Poi* a, const Poi* b) { return a->id < b->id; });
  std::vector<const TimeWindow*> wins;
  for (const auto& w : windows) wins.push_back(&w);
  std::sort(wins.begin(), wins.end(), [](auto* a, auto* b) { return a->label < b->label; });

  const std::size_t jobs = ordered.size() * wins.size();
  std::vector<std::optional<Catchment>> results(jobs);
  std::vector<std::string> failures(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const Poi& poi = *ordered[j / wins.size()];
      const TimeWindow& window = *wins[j % wins.size()];
      try {
        results[j] = compute_catchment(router, poi, window, budget_s, sample_interval_s);
      } catch (const std::exception& e) {
        failures[j] = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  CatchmentBatch batch;
  for (std::size_t j = 0; j < jobs; ++j) {
    if (results[j]) {
      batch.catchments.push_back(std::move(*results[j]));
    } else {
      batch.errors.push_back({ordered[j / wins.size()]->id, wins[j % wins.size()]->label, failures[j]});
    }
  }
  return batch;
}

}  // namespace hexaccess
