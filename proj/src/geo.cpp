#include "hexaccess/geo.hpp"

#include "hexaccess/errors.hpp"

#include <string>

namespace hexaccess {

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || p.lat < -90.0 || p.lat > 90.0 ||
      p.lon < -180.0 || p.lon > 180.0) {
    throw DomainError("coordinate out of range: lat=" + std::to_string(p.lat) +
                      " lon=" + std::to_string(p.lon));
  }
}

namespace {

using Ring2 = Ring<double>;

// Degrees relative to `origin`, which keeps the shoelace sum free of cancellation.
Ring2 to_degree_ring(const std::vector<GeoPoint>& ring, const GeoPoint& origin) {
  Ring2 out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.emplace_back(p.lon - origin.lon, p.lat - origin.lat);
  return out;
}

Ring2 to_degree_ring(const std::vector<GeoPoint>& ring) {
  return ring.empty() ? Ring2{} : to_degree_ring(ring, ring.front());
}

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c,
                    const PlanarPoint& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

void check_simple(const Ring2& ring) {
  const auto n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ring[i] == ring[j]) throw DomainError("polygon ring repeats a vertex");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share exactly one vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_touch(a, b, ring[j], ring[(j + 1) % n])) {
        throw DomainError("polygon ring self-intersects");
      }
    }
  }
}

std::vector<GeoPoint> normalize_ring(std::vector<GeoPoint> ring, bool want_ccw) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw DomainError("polygon ring needs at least 3 distinct vertices");
  for (const auto& p : ring) validate(p);
  const Ring2 planar = to_degree_ring(ring);
  const double area = signed_area(planar);
  if (!(std::abs(area) > 0.0)) throw DomainError("polygon ring has zero area");
  check_simple(planar);
  if ((area > 0) != want_ccw) std::reverse(ring.begin(), ring.end());
  return ring;
}

}  // namespace

Polygon make_polygon(std::vector<GeoPoint> exterior, std::vector<std::vector<GeoPoint>> holes) {
  Polygon poly;
  poly.exterior = normalize_ring(std::move(exterior), true);
  poly.holes.reserve(holes.size());
  for (auto& hole : holes) poly.holes.push_back(normalize_ring(std::move(hole), false));
  if (!(relative_area(poly) > 0.0)) throw DomainError("polygon holes cover its exterior");
  return poly;
}

double relative_area(const Polygon& poly) {
  double lat_sum = 0.0;
  for (const auto& p : poly.exterior) lat_sum += p.lat;
  const double scale = std::cos(deg_to_rad(lat_sum / static_cast<double>(poly.exterior.size())));
  const GeoPoint origin = poly.exterior.empty() ? GeoPoint{} : poly.exterior.front();
  double area = std::abs(signed_area(to_degree_ring(poly.exterior, origin)));
  for (const auto& hole : poly.holes) area -= std::abs(signed_area(to_degree_ring(hole, origin)));
  return area * scale;
}

}  // namespace hexaccess
