#include "hexaccess/hexgrid.hpp"

#include "hexaccess/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hexaccess {

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kMaxLatOffsetDeg = 2.0;
constexpr double kMinFraction = 1e-9;

struct AxialRange {
  std::int32_t q_min, q_max;
};

std::int32_t floor_i(double v) { return static_cast<std::int32_t>(std::floor(v)); }
std::int32_t ceil_i(double v) { return static_cast<std::int32_t>(std::ceil(v)); }

// Visits every cell whose hexagon could intersect the planar box.
template <typename Visit>
void for_each_cell_in_box(const HexGrid& grid, const PlanarPoint& lo, const PlanarPoint& hi, Visit&& visit) {
  const double e = grid.edge();
  const double row_h = kSqrt3 * e;
  const std::int32_t q_min = floor_i((lo.x() - e) / (1.5 * e));
  const std::int32_t q_max = ceil_i((hi.x() + e) / (1.5 * e));
  for (std::int32_t q = q_min; q <= q_max; ++q) {
    const double half_q = 0.5 * q;
    const std::int32_t r_min = floor_i((lo.y() - row_h / 2) / row_h - half_q);
    const std::int32_t r_max = ceil_i((hi.y() + row_h / 2) / row_h - half_q);
    for (std::int32_t r = r_min; r <= r_max; ++r) visit(HexCellId{q, r});
  }
}

}  // namespace

std::string to_string(const HexCellId& c) { return std::to_string(c.q) + ":" + std::to_string(c.r); }

HexCellId parse_cell_id(std::string_view text) {
  const auto colon = text.find(':');
  HexCellId c;
  if (colon == std::string_view::npos) throw DataError("malformed cell id: " + std::string(text));
  const auto* end_q = text.data() + colon;
  const auto* end = text.data() + text.size();
  auto rq = std::from_chars(text.data(), end_q, c.q);
  auto rr = std::from_chars(end_q + 1, end, c.r);
  if (rq.ec != std::errc{} || rq.ptr != end_q || rr.ec != std::errc{} || rr.ptr != end) {
    throw DataError("malformed cell id: " + std::string(text));
  }
  return c;
}

HexGrid::HexGrid(GeoPoint anchor, double edge_m) : anchor_(anchor), edge_m_(edge_m) {
  validate(anchor_);
  if (!(edge_m_ > 0.0) || !std::isfinite(edge_m_)) throw DomainError("hex edge length must be positive");
  if (std::abs(anchor_.lat) > 85.0) throw DomainError("grid anchor too close to a pole");
  cos_anchor_lat_ = std::cos(deg_to_rad(anchor_.lat));
}

double HexGrid::cell_area() const noexcept { return 1.5 * kSqrt3 * edge_m_ * edge_m_; }

PlanarPoint project(const HexGrid& grid, const GeoPoint& p) {
  validate(p);
  const double dlat = p.lat - grid.anchor_.lat;
  if (std::abs(dlat) >= kMaxLatOffsetDeg) throw DomainError("point too far from grid anchor for projection");
  double dlon = p.lon - grid.anchor_.lon;
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  return {kEarthRadiusM * grid.cos_anchor_lat_ * deg_to_rad(dlon), kEarthRadiusM * deg_to_rad(dlat)};
}

GeoPoint unproject(const HexGrid& grid, const PlanarPoint& xy) {
  GeoPoint p{grid.anchor_.lat + rad_to_deg(xy.y() / kEarthRadiusM),
             grid.anchor_.lon + rad_to_deg(xy.x() / (kEarthRadiusM * grid.cos_anchor_lat_))};
  if (p.lon > 180.0) p.lon -= 360.0;
  if (p.lon < -180.0) p.lon += 360.0;
  return p;
}

HexCellId cell_at(const HexGrid& grid, const PlanarPoint& xy) {
  const double e = grid.edge();
  const double fq = (2.0 / 3.0) * xy.x() / e;
  const double fr = (-xy.x() / 3.0 + kSqrt3 / 3.0 * xy.y()) / e;
  const double fs = -fq - fr;
  double q = std::round(fq);
  double r = std::round(fr);
  const double s = std::round(fs);
  const double dq = std::abs(q - fq);
  const double dr = std::abs(r - fr);
  const double ds = std::abs(s - fs);
  if (dq > dr && dq > ds) {
    q = -r - s;
  } else if (dr > ds) {
    r = -q - s;
  }
  return {static_cast<std::int32_t>(q), static_cast<std::int32_t>(r)};
}

HexCellId cell_of(const HexGrid& grid, const GeoPoint& p) { return cell_at(grid, project(grid, p)); }

PlanarPoint cell_center_planar(const HexGrid& grid, const HexCellId& c) {
  const double e = grid.edge();
  return {1.5 * e * c.q, kSqrt3 * e * (c.r + 0.5 * c.q)};
}

GeoPoint cell_center(const HexGrid& grid, const HexCellId& c) {
  return unproject(grid, cell_center_planar(grid, c));
}

PlanarRing cell_ring_planar(const HexGrid& grid, const HexCellId& c) {
  const PlanarPoint center = cell_center_planar(grid, c);
  const double e = grid.edge();
  const double h = kSqrt3 / 2.0 * e;
  return {center + PlanarPoint(e, 0.0),      center + PlanarPoint(e / 2, h),
          center + PlanarPoint(-e / 2, h),   center + PlanarPoint(-e, 0.0),
          center + PlanarPoint(-e / 2, -h),  center + PlanarPoint(e / 2, -h)};
}

Polygon cell_polygon(const HexGrid& grid, const HexCellId& c) {
  Polygon poly;
  for (const auto& corner : cell_ring_planar(grid, c)) poly.exterior.push_back(unproject(grid, corner));
  return poly;
}

std::vector<CellFraction> polygon_cells(const HexGrid& grid, const Polygon& poly) {
  if (poly.exterior.size() < 3) throw DomainError("polygon needs at least 3 vertices");
  auto to_planar = [&](const std::vector<GeoPoint>& ring) {
    PlanarRing out;
    out.reserve(ring.size());
    for (const auto& p : ring) out.push_back(project(grid, p));
    return out;
  };
  const PlanarRing exterior = to_planar(poly.exterior);
  std::vector<PlanarRing> holes;
  for (const auto& hole : poly.holes) holes.push_back(to_planar(hole));

  double total = std::abs(signed_area(exterior));
  for (const auto& hole : holes) total -= std::abs(signed_area(hole));
  if (!(total > 0.0)) throw DomainError("polygon has zero area");

  PlanarPoint lo = exterior.front();
  PlanarPoint hi = exterior.front();
  for (const auto& p : exterior) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  std::vector<CellFraction> out;
  for_each_cell_in_box(grid, lo, hi, [&](const HexCellId& cell) {
    const PlanarRing hex = cell_ring_planar(grid, cell);
    double area = std::abs(signed_area(clip_to_convex(exterior, hex)));
    if (area == 0.0) return;
    for (const auto& hole : holes) area -= std::abs(signed_area(clip_to_convex(hole, hex)));
    const double fraction = area / total;
    if (fraction >= kMinFraction) out.push_back({cell, fraction});
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cell < b.cell; });
  return out;
}

std::vector<HexCellId> disk_cells(const HexGrid& grid, const PlanarPoint& center, double radius_m) {
  if (!(radius_m >= 0.0)) throw DomainError("disk radius must be non-negative");
  std::vector<HexCellId> out;
  const HexCellId own = cell_at(grid, center);
  out.push_back(own);
  const PlanarPoint span(radius_m, radius_m);
  for_each_cell_in_box(grid, center - span, center + span, [&](const HexCellId& cell) {
    if (cell != own && (cell_center_planar(grid, cell) - center).norm() <= radius_m) out.push_back(cell);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<HexCellId> disk_cells(const HexGrid& grid, const GeoPoint& center, double radius_m) {
  return disk_cells(grid, project(grid, center), radius_m);
}

std::vector<HexCellId> neighbors(const HexCellId& c) {
  static constexpr std::int32_t kDirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  std::vector<HexCellId> out;
  out.reserve(6);
  for (const auto& d : kDirs) out.push_back({c.q + d[0], c.r + d[1]});
  return out;
}

}  // namespace hexaccess
