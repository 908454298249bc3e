#pragma once

#include "hexaccess/geo.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hexaccess {

/// Axial coordinate of a flat-top hexagon. Ordered lexicographically by (q, r).
struct HexCellId {
  std::int32_t q = 0;
  std::int32_t r = 0;

  friend auto operator<=>(const HexCellId&, const HexCellId&) = default;
};

/// "q:r" with decimal components.
std::string to_string(const HexCellId& c);
HexCellId parse_cell_id(std::string_view text);

struct HexCellIdHash {
  std::size_t operator()(const HexCellId& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q)) << 32) |
                                      static_cast<std::uint32_t>(c.r));
  }
};

/// Area-preserving default: (3*sqrt(3)/2) * edge^2 is about 0.1 km^2.
inline constexpr double kDefaultEdgeM = 196.2;

/// Flat-top axial hexagon tessellation over a local equirectangular projection centred on `anchor`.
class HexGrid {
 public:
  explicit HexGrid(GeoPoint anchor, double edge_m = kDefaultEdgeM);

  const GeoPoint& anchor() const noexcept { return anchor_; }
  double edge() const noexcept { return edge_m_; }
  double cell_area() const noexcept;

 private:
  GeoPoint anchor_;
  double edge_m_;
  double cos_anchor_lat_;

  friend PlanarPoint project(const HexGrid&, const GeoPoint&);
  friend GeoPoint unproject(const HexGrid&, const PlanarPoint&);
};

/// Meters east/north of the anchor. Throws DomainError more than 2 degrees of latitude away.
PlanarPoint project(const HexGrid& grid, const GeoPoint& p);
GeoPoint unproject(const HexGrid& grid, const PlanarPoint& xy);

/// Cell containing a planar point (cube rounding breaks ties).
HexCellId cell_at(const HexGrid& grid, const PlanarPoint& xy);
HexCellId cell_of(const HexGrid& grid, const GeoPoint& p);

PlanarPoint cell_center_planar(const HexGrid& grid, const HexCellId& c);
GeoPoint cell_center(const HexGrid& grid, const HexCellId& c);

/// Counterclockwise corners starting at angle 0.
PlanarRing cell_ring_planar(const HexGrid& grid, const HexCellId& c);
Polygon cell_polygon(const HexGrid& grid, const HexCellId& c);

struct CellFraction {
  HexCellId cell;
  double fraction = 0.0;
};

/// Area share of `poly` falling in each cell, sorted by cell id. Shares below 1e-9 are dropped.
/// Throws DomainError for zero-area polygons.
std::vector<CellFraction> polygon_cells(const HexGrid& grid, const Polygon& poly);

/// Cells whose centres lie within `radius_m` of `center`, always including the containing cell.
/// Sorted by cell id.
std::vector<HexCellId> disk_cells(const HexGrid& grid, const GeoPoint& center, double radius_m);
std::vector<HexCellId> disk_cells(const HexGrid& grid, const PlanarPoint& center, double radius_m);

/// The six neighbours in counterclockwise order starting east-north-east.
std::vector<HexCellId> neighbors(const HexCellId& c);

}  // namespace hexaccess
