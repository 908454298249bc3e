#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hexaccess {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// WGS84 position in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Throws DomainError unless both coordinates are finite and in range.
void validate(const GeoPoint& p);

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Planar ring without the repeated closing vertex.
template <typename Scalar>
using Ring = std::vector<Point2<Scalar>>;

using PlanarPoint = Point2<double>;
using PlanarRing = Ring<double>;

/// Exterior ring counterclockwise, holes clockwise, rings stored open.
struct Polygon {
  std::vector<GeoPoint> exterior;
  std::vector<std::vector<GeoPoint>> holes;
};

/// Validates and normalizes a polygon: drops the closing vertex if repeated, fixes winding,
/// rejects rings with fewer than 3 vertices, zero area or self-intersections.
Polygon make_polygon(std::vector<GeoPoint> exterior, std::vector<std::vector<GeoPoint>> holes = {});

/// Shoelace signed area; positive for counterclockwise rings.
template <typename Scalar>
Scalar signed_area(const Ring<Scalar>& ring) {
  const auto n = ring.size();
  if (n < 3) return Scalar(0);
  Scalar twice(0);
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += ring[j].x() * ring[i].y() - ring[i].x() * ring[j].y();
  }
  return twice / Scalar(2);
}

/// Sutherland-Hodgman clip of an arbitrary simple ring against a convex counterclockwise ring.
/// The result may contain degenerate slivers for non-convex subjects, but its signed area is
/// exactly the area of the intersection.
template <typename Scalar>
Ring<Scalar> clip_to_convex(const Ring<Scalar>& subject, const Ring<Scalar>& convex) {
  Ring<Scalar> output = subject;
  Ring<Scalar> input;
  const auto m = convex.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2<Scalar>& a = convex[e];
    const Point2<Scalar>& b = convex[(e + 1) % m];
    const Point2<Scalar> edge = b - a;
    auto side = [&](const Point2<Scalar>& p) {
      const Point2<Scalar> d = p - a;
      return edge.x() * d.y() - edge.y() * d.x();
    };
    input.swap(output);
    output.clear();
    const auto n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2<Scalar>& cur = input[i];
      const Point2<Scalar>& prev = input[(i + n - 1) % n];
      const Scalar s_cur = side(cur);
      const Scalar s_prev = side(prev);
      if (s_cur >= 0) {
        if (s_prev < 0) output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
        output.push_back(cur);
      } else if (s_prev >= 0) {
        output.push_back(prev + (cur - prev) * (s_prev / (s_prev - s_cur)));
      }
    }
  }
  return output;
}

/// Even-odd point-in-ring test.
template <typename Scalar>
bool contains(const Ring<Scalar>& ring, const Point2<Scalar>& p) {
  bool inside = false;
  const auto n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

/// Distance from p to the closest point on the ring boundary.
template <typename Scalar>
Scalar boundary_distance(const Ring<Scalar>& ring, const Point2<Scalar>& p) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const auto n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2<Scalar> ab = ring[i] - ring[j];
    const Scalar len2 = ab.squaredNorm();
    Scalar t = len2 > 0 ? (p - ring[j]).dot(ab) / len2 : Scalar(0);
    t = std::clamp(t, Scalar(0), Scalar(1));
    best = std::min(best, (ring[j] + t * ab - p).norm());
  }
  return best;
}

/// Ring area in squared degrees scaled by cos(latitude); only meaningful as a ratio.
double relative_area(const Polygon& poly);

}  // namespace hexaccess

namespace hexaccess {

/// Latitude/longitude box, inclusive on all sides.
struct GeoBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
  friend bool operator==(const GeoBox&, const GeoBox&) = default;
};

}  // namespace hexaccess
