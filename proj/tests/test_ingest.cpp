#include "oracles.hpp"

#include "hexaccess/census.hpp"
#include "hexaccess/errors.hpp"
#include "hexaccess/poi.hpp"
#include "hexaccess/timetable.hpp"

#include <doctest.h>

#include <fstream>
#include <unistd.h>

using namespace hexaccess;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hexaccess_ingest_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

// One route, one trip over three stops at 08:00, 08:10 and 08:25.
fs::path small_feed(const std::string& name, const std::string& stop_times = {}) {
  auto dir = scratch(name);
  put(dir / "stops.txt",
      "stop_id,stop_name,stop_lat,stop_lon,zone_id\n"
      "S1,\"First, Street\",33.7500,-84.3900,z\n"
      "S2,Second,33.7550,-84.3900,z\n"
      "S3,Third,33.7600,-84.3900,z\n");
  put(dir / "routes.txt", "route_id,route_short_name,route_long_name,route_type\nR1,1,Line One,3\n");
  put(dir / "trips.txt", "route_id,service_id,trip_id,shape_id\nR1,WK,T1,sh\n");
  put(dir / "stop_times.txt", stop_times.empty() ? "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                                                   "T1,08:00:00,08:00:00,S1,1\n"
                                                   "T1,08:10:00,08:10:00,S2,2\n"
                                                   "T1,08:25:00,08:25:00,S3,3\n"
                                                 : stop_times);
  put(dir / "calendar.txt",
      "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n"
      "WK,1,1,1,1,1,0,0,20260101,20261231\n");
  return dir;
}

const DemographicSchema kSmallSchema({"a", "b"}, {"m", "f"}, {"lo", "hi"}, {"car", "nocar"});
const std::string kSmallHeader = "unit_id,total,a,b,m,f,lo,hi,car,nocar\n";

std::string ring_json(const HexGrid& grid, std::initializer_list<PlanarPoint> pts) {
  std::string s = "[";
  std::vector<PlanarPoint> ring(pts);
  ring.push_back(ring.front());
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto g = unproject(grid, ring[i]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s[%.17g,%.17g]", i ? "," : "", g.lon, g.lat);
    s += buf;
  }
  return s + "]";
}

std::string feature(const std::string& id, const std::string& geometry) {
  return "{\"type\":\"Feature\",\"properties\":{\"unit_id\":\"" + id + "\"},\"geometry\":" + geometry + "}";
}

std::string collection(std::initializer_list<std::string> features) {
  std::string s = "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  for (const auto& f : features) {
    s += (first ? "" : ",") + f;
    first = false;
  }
  return s + "]}";
}

}  // namespace

TEST_CASE("GTFS times") {
  CHECK(parse_gtfs_time("25:30:00") == 91800);
  CHECK(parse_gtfs_time("08:00:00") == 28800);
  CHECK(parse_gtfs_time("8:05:09") == 8 * 3600 + 5 * 60 + 9);
  CHECK(parse_gtfs_time("00:00:00") == 0);
  CHECK_FALSE(parse_gtfs_time("25:61:00"));
  CHECK_FALSE(parse_gtfs_time("08:00"));
  CHECK_FALSE(parse_gtfs_time("48:00:00"));
  CHECK_FALSE(parse_gtfs_time("ab:cd:ef"));
  CHECK_FALSE(parse_gtfs_time(""));
  for (Seconds t : {0, 59, 3600, 86399, 86400, 91800, 172799}) CHECK(parse_gtfs_time(format_gtfs_time(t)) == t);
}

TEST_CASE("parse_gtfs reads a small feed") {
  const auto net = parse_gtfs(small_feed("ok"));
  CHECK(net.stops.size() == 3);
  CHECK(net.trips.size() == 1);
  CHECK(net.trips[0].stop_times.size() == 3);
  CHECK(net.stops[0].name == "First, Street");
  CHECK(net.trips[0].stop_times[2].arrival == 8 * 3600 + 25 * 60);
  REQUIRE(net.service("WK"));
  CHECK(net.service("WK")->active[static_cast<int>(Weekday::wednesday)]);
  CHECK_FALSE(net.service("WK")->active[static_cast<int>(Weekday::sunday)]);
}

TEST_CASE("parse_gtfs rejects broken feeds") {
  SUBCASE("time going backwards names the trip") {
    const auto dir = small_feed("backwards", "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                                             "T1,08:10:00,08:10:00,S1,1\n"
                                             "T1,08:05:00,08:05:00,S2,2\n");
    const auto msg = error_of([&] { parse_gtfs(dir); });
    CHECK(msg.find("T1") != std::string::npos);
  }
  SUBCASE("missing required file") {
    const auto dir = small_feed("missing");
    fs::remove(dir / "calendar.txt");
    const auto msg = error_of([&] { parse_gtfs(dir); });
    CHECK(msg.find("calendar.txt") != std::string::npos);
  }
  SUBCASE("dangling stop reference") {
    const auto dir = small_feed("dangling", "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                                            "T1,08:00:00,08:00:00,S1,1\n"
                                            "T1,08:10:00,08:10:00,S9,2\n");
    const auto msg = error_of([&] { parse_gtfs(dir); });
    CHECK(msg.find("S9") != std::string::npos);
    CHECK(msg.find("T1") != std::string::npos);
  }
  SUBCASE("malformed time reports the row") {
    const auto dir = small_feed("badtime", "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                                           "T1,08:00:00,08:00:00,S1,1\n"
                                           "T1,08:1O:00,08:10:00,S2,2\n");
    const auto msg = error_of([&] { parse_gtfs(dir); });
    CHECK(msg.find("stop_times.txt:3") != std::string::npos);
  }
  SUBCASE("stop times are ordered by sequence, not by file order") {
    const auto dir = small_feed("order", "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                                         "T1,08:25:00,08:25:00,S3,30\n"
                                         "T1,08:00:00,08:00:00,S1,10\n"
                                         "T1,08:10:00,08:10:00,S2,20\n");
    const auto net = parse_gtfs(dir);
    CHECK(net.stops[net.trips[0].stop_times[0].stop].id == "S1");
    CHECK(net.stops[net.trips[0].stop_times[2].stop].id == "S3");
  }
}

TEST_CASE("transfers.txt keeps timed transfers only") {
  const auto dir = small_feed("transfers");
  put(dir / "transfers.txt",
      "from_stop_id,to_stop_id,transfer_type,min_transfer_time\nS1,S2,2,120\nS2,S3,3,\nS3,S1,0,\n");
  const auto net = parse_gtfs(dir);
  REQUIRE(net.transfers.size() == 2);
  CHECK(net.transfers[0].duration == 120);
  CHECK(net.transfers[1].duration == 0);
}

TEST_CASE("GTFS write then parse is the identity") {
  const auto& grid = oracle::gridville().city->grid;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 25; ++i) {
    const auto net = oracle::random_timetable(grid, rng);
    const auto dir = scratch("roundtrip" + std::to_string(i));
    write_gtfs(net, dir);
    CHECK(parse_gtfs(dir) == net);
  }
  const auto original = parse_gtfs(oracle::data_dir() / "gridville" / "gtfs");
  const auto dir = scratch("roundtrip_gridville");
  write_gtfs(original, dir);
  CHECK(parse_gtfs(dir) == original);
}

TEST_CASE("parse_pois") {
  const auto pois = parse_pois_text(
      "id,category,name,lat,lon,supply_units\n"
      "h1,hospital_clinic,General,33.75,-84.39\n"
      "g1,grocery,\"Market, Hall\",33.76,-84.38,2.5\n");
  REQUIRE(pois.size() == 2);
  CHECK(pois[0].supply_units == 1.0);
  CHECK(pois[0].origin == PoiOrigin::baseline);
  CHECK(pois[0].category == PoiCategory::hospital_clinic);
  CHECK(pois[1].supply_units == 2.5);
  CHECK(pois[1].name == "Market, Hall");

  CHECK(parse_pois_text("id,category,name,lat,lon\nx,school,X,1,2\n").at(0).supply_units == 1.0);

  auto msg = error_of([] { parse_pois_text("id,category,name,lat,lon\nb1,bank,Bank,33.7,-84.3\n", "pois.csv"); });
  CHECK(msg.find("bank") != std::string::npos);
  CHECK(msg.find("pois.csv:2") != std::string::npos);
  msg = error_of([] { parse_pois_text("id,category,name,lat,lon\na,school,A,1,1\na,school,B,2,2\n"); });
  CHECK(msg.find("duplicate") != std::string::npos);
  CHECK_THROWS_AS(parse_pois_text("id,category,name,lat,lon\na,school,A,91,1\n"), DataError);
  CHECK_THROWS_AS(parse_pois_text("id,category,name,lat,lon\na,school,A,1,181\n"), DataError);
  CHECK_THROWS_AS(parse_pois_text("id,category,name,lat,lon,supply_units\na,school,A,1,1,0\n"), DataError);
  CHECK_THROWS_AS(parse_pois_text("id,name,lat,lon\na,A,1,1\n"), DataError);
}

TEST_CASE("parse_census joins geometry and demographics") {
  const HexGrid grid(GeoPoint{33.75, -84.39});
  const auto sq = [&](double x, double y, double w, double h) {
    return ring_json(grid, {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
  };
  const std::string two = collection({feature("u1", "{\"type\":\"Polygon\",\"coordinates\":[" + sq(0, 0, 100, 100) + "]}"),
                                      feature("u2", "{\"type\":\"Polygon\",\"coordinates\":[" + sq(200, 0, 100, 100) + "]}")});
  const std::string rows = kSmallHeader + "u1,10,4,6,5,5,7,3,2,8\nu2,20,10,10,10,10,10,10,10,10\n";
  const auto units = parse_census_text(two, rows, kSmallSchema);
  REQUIRE(units.size() == 2);
  CHECK(units[0].demographics(0) == 10);
  CHECK(units[1].demographics(kSmallSchema.index_of(Dimension::race, "b")) == 10);

  SUBCASE("row without geometry is fatal and names the unit") {
    const auto msg = error_of([&] { parse_census_text(two, rows + "u3,1,1,0,1,0,1,0,1,0\n", kSmallSchema); });
    CHECK(msg.find("u3") != std::string::npos);
  }
  SUBCASE("geometry without row is fatal") {
    CHECK_THROWS_AS(parse_census_text(two, kSmallHeader + "u1,10,4,6,5,5,7,3,2,8\n", kSmallSchema), DataError);
  }
  SUBCASE("negative count") {
    CHECK_THROWS_AS(
        parse_census_text(two, kSmallHeader + "u1,10,14,-4,5,5,7,3,2,8\nu2,20,10,10,10,10,10,10,10,10\n", kSmallSchema),
        DataError);
  }
  SUBCASE("bracket sums must match the total") {
    CHECK_THROWS_AS(
        parse_census_text(two, kSmallHeader + "u1,10,4,7,5,5,7,3,2,8\nu2,20,10,10,10,10,10,10,10,10\n", kSmallSchema),
        DataError);
  }
  SUBCASE("MultiPolygon parts split by area") {
    const std::string multi = collection({feature(
        "m", "{\"type\":\"MultiPolygon\",\"coordinates\":[[" + sq(0, 0, 100, 100) + "],[" + sq(500, 0, 300, 100) + "]]}")});
    const auto parts = parse_census_text(multi, kSmallHeader + "m,400,200,200,100,300,400,0,0,400\n", kSmallSchema);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].demographics(0) == doctest::Approx(100).epsilon(1e-7));
    CHECK(parts[1].demographics(0) == doctest::Approx(300).epsilon(1e-7));
    CHECK(parts[1].demographics(kSmallSchema.index_of(Dimension::age_sex, "f")) == doctest::Approx(225).epsilon(1e-7));
    CHECK(parts[0].id != parts[1].id);
  }
}

TEST_CASE("allocate_demographics") {
  const HexGrid grid(GeoPoint{33.75, -84.39});
  const double e = grid.edge();
  auto unit_from_ring = [&](const std::string& id, const std::vector<PlanarPoint>& ring, double total) {
    std::vector<GeoPoint> geo;
    for (const auto& p : ring) geo.push_back(unproject(grid, p));
    DemographicVector<> v = DemographicVector<>::Zero(kSmallSchema.size());
    v(0) = total;
    for (auto d : kGroupDimensions) v(kSmallSchema.offset(d)) = total;
    return CensusUnit{id, make_polygon(geo), v};
  };

  SUBCASE("unit equal to one cell") {
    const auto ring = cell_ring_planar(grid, {2, 3});
    const auto demo = allocate_demographics({unit_from_ring("a", ring, 200)}, grid, kSmallSchema);
    CHECK(demo.total({2, 3}) == doctest::Approx(200).epsilon(1e-7));
    CHECK(demo.totals().sum() == doctest::Approx(200).epsilon(1e-9));
  }
  SUBCASE("unit split 25/75") {
    const double wall = std::sqrt(3.0) / 2.0 * e;
    const double h = 0.2 * e;
    const std::vector<PlanarPoint> rect = {
        {-e / 4, wall - 0.25 * h}, {e / 4, wall - 0.25 * h}, {e / 4, wall + 0.75 * h}, {-e / 4, wall + 0.75 * h}};
    const auto demo = allocate_demographics({unit_from_ring("a", rect, 200)}, grid, kSmallSchema);
    CHECK(demo.total({0, 0}) == doctest::Approx(50).epsilon(1e-6));
    CHECK(demo.total({0, 1}) == doctest::Approx(150).epsilon(1e-6));
  }
  SUBCASE("contributions to a shared cell add up") {
    const auto c = cell_center_planar(grid, {0, 0});
    const std::vector<PlanarPoint> left = {c + PlanarPoint(-60, -50), c + PlanarPoint(-10, -50), c + PlanarPoint(-10, 50),
                                           c + PlanarPoint(-60, 50)};
    const std::vector<PlanarPoint> right = {c + PlanarPoint(10, -50), c + PlanarPoint(60, -50), c + PlanarPoint(60, 50),
                                            c + PlanarPoint(10, 50)};
    const auto demo = allocate_demographics({unit_from_ring("l", left, 30), unit_from_ring("r", right, 12)}, grid,
                                            kSmallSchema);
    CHECK(demo.cells().size() == 1);
    CHECK(demo.total({0, 0}) == doctest::Approx(42));
  }
}

TEST_CASE("allocation conserves every bracket and ignores unit order") {
  const HexGrid grid(GeoPoint{33.75, -84.39});
  const DemographicSchema schema;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 10; ++round) {
    std::vector<CensusUnit> units;
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(schema.size());
    for (int k = 0; k < 8; ++k) {
      DemographicVector<> v(schema.size());
      const double total = std::floor(u(rng) * 3000);
      v(0) = total;
      for (auto d : kGroupDimensions) {
        const auto n = static_cast<Eigen::Index>(schema.brackets(d).size());
        Eigen::VectorXd w(n);
        for (auto& x : w) x = u(rng);
        v.segment(schema.offset(d), n) = w * (total / w.sum());
      }
      expected += v;
      units.push_back({"u" + std::to_string(k), oracle::random_polygon(grid, rng, 200 + 900 * u(rng), k % 2 == 0), v});
    }
    const auto demo = allocate_demographics(units, grid, schema);
    const Eigen::VectorXd got = demo.counts().rowwise().sum();
    for (Eigen::Index i = 0; i < schema.size(); ++i) {
      CHECK(std::abs(got(i) - expected(i)) <= 0.005 * std::max(expected(i), 1.0));
    }
    for (Eigen::Index j = 0; j < demo.size(); ++j) {
      CHECK(demo.column(j).minCoeff() >= 0.0);
      CHECK_NOTHROW(check_demographics(schema, demo.column(j), 0.5, "cell"));
    }
    auto shuffled = units;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(allocate_demographics(shuffled, grid, schema) == demo);
  }
}

TEST_CASE("Gridville census allocates 100 people to each of its 400 cells") {
  const auto& city = *oracle::gridville().city;
  const auto cells = gridville_cells();
  CHECK(city.demo.cells() == cells);
  for (Eigen::Index j = 0; j < city.demo.size(); ++j) CHECK(city.demo.totals()(j) == doctest::Approx(100).epsilon(1e-7));
}
