#include "oracles.hpp"

#include "hexaccess/errors.hpp"
#include "hexaccess/hexgrid.hpp"

#include <doctest.h>

using namespace hexaccess;

namespace {

const GeoPoint kAnchor{33.75, -84.39};

bool inside_or_on(const HexGrid& grid, const HexCellId& c, const PlanarPoint& p) {
  const auto ring = cell_ring_planar(grid, c);
  return contains(ring, p) || boundary_distance(ring, p) <= 1e-9;
}

Polygon planar_polygon(const HexGrid& grid, std::initializer_list<PlanarPoint> pts) {
  std::vector<GeoPoint> ring;
  for (const auto& p : pts) ring.push_back(unproject(grid, p));
  return make_polygon(ring);
}

}  // namespace

TEST_CASE("projection follows the equirectangular formula") {
  const HexGrid grid(kAnchor);
  CHECK(project(grid, kAnchor).norm() == 0.0);

  const double expected = kEarthRadiusM * 0.01 * kPi / 180.0;
  const auto north = project(grid, {kAnchor.lat + 0.01, kAnchor.lon});
  CHECK(north.x() == doctest::Approx(0.0));
  CHECK(std::abs(north.y() - expected) < 0.01);
  CHECK(std::abs(north.y() - 1111.95) < 0.01);

  const HexGrid equator(GeoPoint{0.0, 10.0});
  const auto east = project(equator, {0.0, 10.01});
  CHECK(std::abs(east.x() - expected) < 0.01);
  CHECK(std::abs(east.y()) < 1e-9);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p{kAnchor.lat + d(rng), kAnchor.lon + d(rng)};
    const auto back = unproject(grid, project(grid, p));
    CHECK(back.lat == doctest::Approx(p.lat).epsilon(1e-12));
    CHECK(back.lon == doctest::Approx(p.lon).epsilon(1e-12));
  }
}

TEST_CASE("projection rejects points outside its validity range") {
  const HexGrid grid(kAnchor);
  CHECK_THROWS_AS(project(grid, {kAnchor.lat + 2.5, kAnchor.lon}), DomainError);
  CHECK_THROWS_AS(project(grid, {95.0, 0.0}), DomainError);
  CHECK_THROWS_AS(project(grid, {kAnchor.lat, std::nan("")}), DomainError);
  CHECK_THROWS_AS(HexGrid(kAnchor, 0.0), DomainError);
}

TEST_CASE("cell ids format and parse as q:r") {
  CHECK(to_string(HexCellId{-3, 12}) == "-3:12");
  CHECK(parse_cell_id("-3:12") == HexCellId{-3, 12});
  CHECK(parse_cell_id("0:0") == HexCellId{0, 0});
  CHECK_THROWS_AS(parse_cell_id("3"), DataError);
  CHECK_THROWS_AS(parse_cell_id("a:b"), DataError);
  CHECK_THROWS_AS(parse_cell_id("1:2:3"), DataError);
  CHECK(HexCellId{0, 5} < HexCellId{1, -5});
  CHECK(HexCellId{1, -5} < HexCellId{1, -4});
}

TEST_CASE("cell_of and cell_center") {
  const HexGrid grid(kAnchor);
  CHECK(cell_of(grid, kAnchor) == HexCellId{0, 0});
  CHECK(cell_center(grid, {0, 0}) == kAnchor);

  SUBCASE("round trip over a 50x50 block") {
    for (int q = -25; q < 25; ++q) {
      for (int r = -25; r < 25; ++r) CHECK(cell_of(grid, cell_center(grid, {q, r})) == HexCellId{q, r});
    }
  }
  SUBCASE("axial basis") {
    const double e = grid.edge();
    const auto c = cell_center_planar(grid, {1, 0});
    CHECK(c.x() == doctest::Approx(1.5 * e));
    CHECK(c.y() == doctest::Approx(std::sqrt(3.0) / 2.0 * e));
    for (const auto& n : neighbors({0, 0})) {
      CHECK(cell_center_planar(grid, n).norm() == doctest::Approx(std::sqrt(3.0) * e).epsilon(1e-12));
    }
  }
  SUBCASE("point two edges east sits on the corner shared by two eastern cells") {
    const PlanarPoint p(2.0 * grid.edge(), 0.0);
    const auto c = cell_at(grid, p);
    CHECK((c == HexCellId{1, 0} || c == HexCellId{1, -1}));
    CHECK((cell_center_planar(grid, c) - p).norm() == doctest::Approx(grid.edge()).epsilon(1e-12));
    const PlanarPoint q(2.1 * grid.edge(), 0.01);
    CHECK(cell_at(grid, q) == oracle::nearest_center(grid.edge(), q, 2));
  }
  SUBCASE("1000 random points land in exactly the polygon of their cell") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5000.0, 5000.0);
    for (int i = 0; i < 1000; ++i) {
      const PlanarPoint p(u(rng), u(rng));
      const auto c = cell_of(grid, unproject(grid, p));
      CHECK(inside_or_on(grid, c, project(grid, unproject(grid, p))));
      const auto want = oracle::nearest_center(grid.edge(), p);
      // ties on a shared edge may go either way; the chosen centre must be as close as the oracle's
      if (c != want) {
        CHECK((cell_center_planar(grid, c) - p).norm() ==
              doctest::Approx((cell_center_planar(grid, want) - p).norm()).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("cell polygons") {
  const HexGrid grid(kAnchor);
  const double e = grid.edge();
  const double formula = 1.5 * std::sqrt(3.0) * e * e;

  const auto poly = cell_polygon(grid, {0, 0});
  CHECK(poly.exterior.size() == 6);
  std::set<std::pair<double, double>> distinct;
  for (const auto& p : poly.exterior) distinct.emplace(p.lat, p.lon);
  CHECK(distinct.size() == 6);

  const auto ring = cell_ring_planar(grid, {0, 0});
  CHECK(contains(ring, PlanarPoint(0, 0)));

  // independent corners: centre + e * (cos 60k, sin 60k)
  std::vector<PlanarPoint> corners;
  for (int k = 0; k < 6; ++k) corners.emplace_back(e * std::cos(k * kPi / 3), e * std::sin(k * kPi / 3));
  const double area = oracle::shoelace(corners);
  CHECK(std::abs(oracle::shoelace(ring) - area) / area < 1e-12);
  CHECK(std::abs(grid.cell_area() - formula) / formula < 1e-6);
  CHECK(std::abs(area - formula) < 10.0);
  for (int q = -3; q <= 3; ++q) {
    const auto r = cell_ring_planar(grid, {q, 2 * q - 1});
    CHECK(std::abs(oracle::shoelace(r) - formula) / formula < 1e-6);
  }
}

TEST_CASE("polygon_cells on exact constructions") {
  const HexGrid grid(kAnchor);
  const double e = grid.edge();

  SUBCASE("a cell's own polygon") {
    const HexCellId c{4, -7};
    const auto out = polygon_cells(grid, cell_polygon(grid, c));
    double own = 0, others = 0;
    for (const auto& f : out) (f.cell == c ? own : others) += f.fraction;
    CHECK(own == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(others <= 1e-6);
  }
  SUBCASE("rectangle split 30/70 across the wall between (0,0) and (0,1)") {
    // the shared wall is horizontal at y = sqrt(3)/2 e for |x| <= e/2
    const double wall = std::sqrt(3.0) / 2.0 * e;
    const double h = 0.2 * e;
    const auto rect = planar_polygon(grid, {{-e / 4, wall - 0.3 * h},
                                            {e / 4, wall - 0.3 * h},
                                            {e / 4, wall + 0.7 * h},
                                            {-e / 4, wall + 0.7 * h}});
    const auto out = polygon_cells(grid, rect);
    REQUIRE(out.size() == 2);
    CHECK(out[0].cell == HexCellId{0, 0});
    CHECK(out[1].cell == HexCellId{0, 1});
    CHECK(out[0].fraction == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(out[1].fraction == doctest::Approx(0.7).epsilon(1e-6));
  }
  SUBCASE("polygon strictly inside one cell") {
    const auto c = cell_center_planar(grid, {-2, 5});
    const auto tri = planar_polygon(grid, {c + PlanarPoint(-50, -40), c + PlanarPoint(60, -30), c + PlanarPoint(0, 70)});
    const auto out = polygon_cells(grid, tri);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cell == HexCellId{-2, 5});
    CHECK(out[0].fraction == doctest::Approx(1.0));
  }
  SUBCASE("holes are subtracted") {
    // 6e square with an e-square hole that sits inside the origin cell
    const auto outer = std::vector<GeoPoint>{unproject(grid, {-3 * e, -3 * e}), unproject(grid, {3 * e, -3 * e}),
                                             unproject(grid, {3 * e, 3 * e}), unproject(grid, {-3 * e, 3 * e})};
    const auto hole = std::vector<GeoPoint>{unproject(grid, {-0.5 * e, -0.5 * e}), unproject(grid, {-0.5 * e, 0.5 * e}),
                                            unproject(grid, {0.5 * e, 0.5 * e}), unproject(grid, {0.5 * e, -0.5 * e})};
    const auto poly = make_polygon(outer, {hole});
    double sum = 0, centre = 0;
    for (const auto& f : polygon_cells(grid, poly)) {
      sum += f.fraction;
      if (f.cell == HexCellId{0, 0}) centre = f.fraction;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    const double cell_share = (grid.cell_area() - e * e) / (36 * e * e - e * e);
    CHECK(centre == doctest::Approx(cell_share).epsilon(1e-9));
  }
  SUBCASE("degenerate polygons are rejected") {
    Polygon flat;
    flat.exterior = {unproject(grid, {0, 0}), unproject(grid, {100, 0}), unproject(grid, {200, 0})};
    CHECK_THROWS_AS(polygon_cells(grid, flat), DomainError);
    CHECK_THROWS_AS(make_polygon(flat.exterior), DomainError);
  }
}

TEST_CASE("polygon_cells fractions sum to one and match sampling") {
  const HexGrid grid(kAnchor);
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 40; ++i) {
    const auto poly = oracle::random_polygon(grid, rng, 150 + 1500 * (i % 4) / 3.0, i % 3 == 0);
    const auto out = polygon_cells(grid, poly);
    double sum = 0;
    for (const auto& f : out) {
      CHECK(f.fraction >= 1e-9);
      CHECK(f.fraction <= 1.0 + 1e-12);
      sum += f.fraction;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::is_sorted(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cell < b.cell; }));
    const auto again = polygon_cells(grid, poly);
    REQUIRE(again.size() == out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      CHECK(again[k].cell == out[k].cell);
      CHECK(again[k].fraction == out[k].fraction);
    }
  }
  for (int i = 0; i < 4; ++i) {
    const auto poly = oracle::random_polygon(grid, rng, 700, i % 2 == 1);
    const auto sampled = oracle::monte_carlo_fractions(grid, poly, 100000, rng);
    std::map<HexCellId, double> exact;
    for (const auto& f : polygon_cells(grid, poly)) exact[f.cell] = f.fraction;
    for (const auto& [cell, share] : sampled) CHECK(std::abs(share - exact[cell]) <= 0.02);
    for (const auto& [cell, share] : exact) CHECK(std::abs(share - (sampled.count(cell) ? sampled.at(cell) : 0.0)) <= 0.02);
  }
}

TEST_CASE("disk_cells") {
  const HexGrid grid(kAnchor);
  const double e = grid.edge();
  const GeoPoint at = cell_center(grid, {3, -1});

  CHECK(disk_cells(grid, at, 0.0) == std::vector<HexCellId>{{3, -1}});
  const auto near = disk_cells(grid, at, std::sqrt(3.0) * e + 1e-6);
  CHECK(near.size() == 7);
  auto expect = neighbors({3, -1});
  expect.push_back({3, -1});
  std::sort(expect.begin(), expect.end());
  CHECK(near == expect);
  CHECK_THROWS_AS(disk_cells(grid, at, -1.0), DomainError);

  // off-centre point with a tiny radius still gets its own cell
  const GeoPoint off = unproject(grid, cell_center_planar(grid, {0, 0}) + PlanarPoint(0.6 * e, 0.2 * e));
  CHECK(disk_cells(grid, off, 1.0) == std::vector<HexCellId>{cell_of(grid, off)});

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2000.0, 2000.0), ur(0.0, 1200.0);
  for (int i = 0; i < 300; ++i) {
    const PlanarPoint c(u(rng), u(rng));
    double r1 = ur(rng), r2 = ur(rng);
    if (r1 > r2) std::swap(r1, r2);
    const auto small = disk_cells(grid, c, r1);
    const auto large = disk_cells(grid, c, r2);
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));

    // brute force: every centre within r2 in a generous window, plus the containing cell
    std::vector<HexCellId> want{cell_at(grid, c)};
    const auto base = oracle::nearest_center(e, c);
    const int reach = static_cast<int>(r2 / e) + 3;
    for (int dq = -reach; dq <= reach; ++dq) {
      for (int dr = -reach; dr <= reach; ++dr) {
        const HexCellId h{base.q + dq, base.r + dr};
        if ((oracle::axial_center(e, h) - c).norm() <= r2) want.push_back(h);
      }
    }
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    CHECK(large == want);
  }
}
