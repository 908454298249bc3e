#pragma once

#include "hexaccess/geo.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexaccess {

enum class PoiCategory { vaccination_center, grocery, restaurant, school, hospital_clinic, cinema_theatre };

inline constexpr std::array<PoiCategory, 6> kPoiCategories = {
    PoiCategory::vaccination_center, PoiCategory::grocery,         PoiCategory::restaurant,
    PoiCategory::school,             PoiCategory::hospital_clinic, PoiCategory::cinema_theatre};

std::string_view to_string(PoiCategory c);
std::optional<PoiCategory> parse_category(std::string_view name);

enum class PoiOrigin { baseline, scenario };
std::string_view to_string(PoiOrigin o);

struct Poi {
  std::string id;
  PoiCategory category = PoiCategory::vaccination_center;
  std::string name;
  GeoPoint location;
  double supply_units = 1.0;
  PoiOrigin origin = PoiOrigin::baseline;

  friend bool operator==(const Poi&, const Poi&) = default;
};

/// CSV with header id,category,name,lat,lon[,supply_units]. Rows come back in file order.
std::vector<Poi> parse_pois(const std::filesystem::path& path);
std::vector<Poi> parse_pois_text(std::string_view text, std::string source_name = "<memory>");

void write_pois(const std::vector<Poi>& pois, const std::filesystem::path& path);

}  // namespace hexaccess
