#include "hexaccess/demographics.hpp"

#include "hexaccess/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hexaccess {

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::race: return "race";
    case Dimension::age_sex: return "age_sex";
    case Dimension::income: return "income";
    case Dimension::vehicle: return "vehicle";
    case Dimension::total: return "total";
  }
  return "unknown";
}

std::optional<Dimension> parse_dimension(std::string_view name) {
  for (auto d : {Dimension::race, Dimension::age_sex, Dimension::income, Dimension::vehicle, Dimension::total}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

DemographicSchema::DemographicSchema()
    : DemographicSchema({"white", "black", "asian", "other"},
                        {"male_under_18", "male_18_64", "male_65_plus", "female_under_18", "female_18_64",
                         "female_65_plus"},
                        {"under_10k", "10k_50k", "50k_100k", "100k_200k", "over_200k"},
                        {"no_vehicle", "has_vehicle"}) {}

DemographicSchema::DemographicSchema(std::vector<std::string> race, std::vector<std::string> age_sex,
                                     std::vector<std::string> income, std::vector<std::string> vehicle)
    : race_(std::move(race)), age_sex_(std::move(age_sex)), income_(std::move(income)), vehicle_(std::move(vehicle)) {
  layout();
}

void DemographicSchema::layout() {
  std::set<std::string> seen{"all", "total", "unit_id"};
  Eigen::Index offset = 0;
  for (auto d : {Dimension::total, Dimension::race, Dimension::age_sex, Dimension::income, Dimension::vehicle}) {
    const auto& names = brackets(d);
    if (names.empty()) throw ConfigError("dimension '" + std::string(to_string(d)) + "' has no brackets");
    if (d != Dimension::total) {
      for (const auto& n : names) {
        if (!seen.insert(n).second) throw ConfigError("bracket name '" + n + "' is not unique");
      }
    }
    offsets_[static_cast<std::size_t>(d)] = offset;
    offset += static_cast<Eigen::Index>(names.size());
  }
  size_ = offset;
}

const std::vector<std::string>& DemographicSchema::brackets(Dimension d) const {
  switch (d) {
    case Dimension::race: return race_;
    case Dimension::age_sex: return age_sex_;
    case Dimension::income: return income_;
    case Dimension::vehicle: return vehicle_;
    case Dimension::total: return total_;
  }
  return total_;
}

Eigen::Index DemographicSchema::offset(Dimension d) const { return offsets_[static_cast<std::size_t>(d)]; }

Eigen::Index DemographicSchema::index_of(Dimension d, std::string_view bracket) const {
  const auto& names = brackets(d);
  auto it = std::find(names.begin(), names.end(), bracket);
  if (it == names.end()) {
    throw NotFoundError("unknown_bracket", "unknown bracket '" + std::string(bracket) + "' in dimension " +
                                               std::string(to_string(d)));
  }
  return offset(d) + (it - names.begin());
}

void check_demographics(const DemographicSchema& schema, const DemographicVector<>& v, double slack,
                        std::string_view what) {
  if (v.size() != schema.size()) throw DataError(std::string(what) + ": demographic vector has wrong size");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) throw DataError(std::string(what) + ": negative or invalid count");
  }
  for (auto d : kGroupDimensions) {
    const auto n = static_cast<Eigen::Index>(schema.brackets(d).size());
    const double sum = v.segment(schema.offset(d), n).sum();
    if (std::abs(sum - v[0]) > slack) {
      throw DataError(std::string(what) + ": " + std::string(to_string(d)) + " brackets sum to " +
                      std::to_string(sum) + " but total is " + std::to_string(v[0]));
    }
  }
}

HexDemographics::HexDemographics(DemographicSchema schema, std::vector<HexCellId> cells, Eigen::MatrixXd counts)
    : schema_(std::move(schema)), cells_(std::move(cells)), counts_(std::move(counts)) {
  if (counts_.cols() != static_cast<Eigen::Index>(cells_.size()) || counts_.rows() != schema_.size()) {
    throw DomainError("demographic matrix shape does not match schema and cells");
  }
  if (!std::is_sorted(cells_.begin(), cells_.end()) ||
      std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end()) {
    throw DomainError("demographic cells must be sorted and unique");
  }
}

HexDemographics HexDemographics::from_map(DemographicSchema schema,
                                          const std::map<HexCellId, DemographicVector<>>& cells) {
  std::vector<HexCellId> ids;
  Eigen::MatrixXd counts(schema.size(), static_cast<Eigen::Index>(cells.size()));
  Eigen::Index col = 0;
  for (const auto& [cell, v] : cells) {
    ids.push_back(cell);
    counts.col(col++) = v;
  }
  return HexDemographics(std::move(schema), std::move(ids), std::move(counts));
}

std::optional<Eigen::Index> HexDemographics::find(const HexCellId& cell) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), cell);
  if (it == cells_.end() || *it != cell) return std::nullopt;
  return static_cast<Eigen::Index>(it - cells_.begin());
}

double HexDemographics::total(const HexCellId& cell) const {
  if (auto i = find(cell)) return counts_(0, *i);
  return 0.0;
}

}  // namespace hexaccess
