#include "hexaccess/poi.hpp"

#include "hexaccess/csv.hpp"
#include "hexaccess/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace hexaccess {

namespace {
constexpr std::array<std::string_view, 6> kCategoryNames = {"vaccination_center", "grocery",
                                                            "restaurant",         "school",
                                                            "hospital_clinic",    "cinema_theatre"};

std::vector<Poi> parse_table(const CsvTable& t) {
  const auto c_id = t.require_column("id");
  const auto c_cat = t.require_column("category");
  const auto c_name = t.require_column("name");
  const auto c_lat = t.require_column("lat");
  const auto c_lon = t.require_column("lon");
  const auto c_supply = t.column("supply_units");
  std::vector<Poi> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string at = t.source() + ":" + std::to_string(t.line(i));
    Poi p;
    p.id = trim(t.field(i, c_id));
    if (p.id.empty()) throw DataError(at + ": empty POI id");
    if (!ids.insert(p.id).second) throw DataError(at + ": duplicate POI id " + p.id);
    const auto cat = trim(t.field(i, c_cat));
    auto category = parse_category(cat);
    if (!category) throw DataError(at + ": unknown POI category '" + cat + "'");
    p.category = *category;
    p.name = std::string(t.field(i, c_name));
    auto lat = parse_double(t.field(i, c_lat));
    auto lon = parse_double(t.field(i, c_lon));
    if (!lat || !lon) throw DataError(at + ": malformed coordinates for POI " + p.id);
    p.location = {*lat, *lon};
    try {
      validate(p.location);
    } catch (const DomainError& e) {
      throw DataError(at + ": POI " + p.id + ": " + e.what());
    }
    if (c_supply && !trim(t.field(i, *c_supply)).empty()) {
      auto supply = parse_double(t.field(i, *c_supply));
      if (!supply || !(*supply > 0.0) || !std::isfinite(*supply)) {
        throw DataError(at + ": supply_units must be a positive number for POI " + p.id);
      }
      p.supply_units = *supply;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string_view to_string(PoiCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<PoiCategory> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<PoiCategory>(i);
  }
  return std::nullopt;
}

std::string_view to_string(PoiOrigin o) { return o == PoiOrigin::baseline ? "baseline" : "scenario"; }

std::vector<Poi> parse_pois(const std::filesystem::path& path) { return parse_table(CsvTable::read(path)); }

std::vector<Poi> parse_pois_text(std::string_view text, std::string source_name) {
  return parse_table(CsvTable::parse(text, std::move(source_name)));
}

void write_pois(const std::vector<Poi>& pois, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  auto num = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  out << "id,category,name,lat,lon,supply_units\n";
  for (const auto& p : pois) {
    out << csv_escape(p.id) << ',' << to_string(p.category) << ',' << csv_escape(p.name) << ','
        << num(p.location.lat) << ',' << num(p.location.lon) << ',' << num(p.supply_units) << '\n';
  }
}

}  // namespace hexaccess
