#pragma once

#include "hexaccess/demographics.hpp"
#include "hexaccess/hexgrid.hpp"
#include "hexaccess/poi.hpp"
#include "hexaccess/routing.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hexaccess {

/// Supply-to-demand ratio of one POI over its catchment. Zero-population catchments get r = 0 and
/// are flagged degenerate.
struct SupplyRatio {
  std::string poi_id;
  double r_value = 0.0;
  double catchment_pop = 0.0;
  bool degenerate = false;

  friend bool operator==(const SupplyRatio&, const SupplyRatio&) = default;
};

/// Total population over the catchment cells, summed in cell order. Cells without data count 0.
double catchment_population(std::span<const HexCellId> cells, const HexDemographics& demo);

SupplyRatio supply_ratio(const Poi& poi, const Catchment& catchment, const HexDemographics& demo);

/// Per-cell accessibility for one (city, category, window). Cells sorted; scores aligned with cells.
struct AccessibilityLayer {
  std::string city;
  PoiCategory category = PoiCategory::vaccination_center;
  WindowLabel window = WindowLabel::morning;
  std::vector<HexCellId> cells;
  Eigen::VectorXd scores;

  std::optional<Eigen::Index> find(const HexCellId& cell) const;
  /// Zero for cells outside the layer.
  double score(const HexCellId& cell) const;

  friend bool operator==(const AccessibilityLayer& a, const AccessibilityLayer& b) {
    return a.city == b.city && a.category == b.category && a.window == b.window && a.cells == b.cells &&
           a.scores.size() == b.scores.size() && a.scores == b.scores;
  }
};

/// Cell-by-POI coverage. Row h holds a 1 for each catchment covering cell h; columns follow POI id order.
using Incidence = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Decides whether a catchment cell without demographic data still belongs to the layer.
using CellFilter = std::function<bool(const HexCellId&)>;

/// Everything step two needs: layer domain, POI columns in id order, their ratios and the incidence.
struct AccessModel {
  std::vector<HexCellId> cells;
  std::vector<std::string> poi_ids;
  Eigen::VectorXd ratios;
  Incidence incidence;
};

/// Pairs ratios with catchments by POI id (one-to-one or DomainError) and builds the incidence over
/// demographic cells plus catchment cells accepted by `keep` (all of them when `keep` is empty).
AccessModel build_access_model(std::span<const SupplyRatio> ratios, std::span<const Catchment> catchments,
                               const HexDemographics& demo, const CellFilter& keep = {});

/// Sum of covering ratios for one incidence row, accumulated in column order starting from zero.
double covering_sum(const AccessModel& model, Eigen::Index row);

AccessibilityLayer evaluate(const AccessModel& model);

/// A_h = sum of R_j over the catchments containing h.
AccessibilityLayer accessibility_layer(std::span<const SupplyRatio> ratios, std::span<const Catchment> catchments,
                                       const HexDemographics& demo, const CellFilter& keep = {});

/// Population-weighted mean score of one bracket. nullopt when the bracket has no population.
std::optional<double> group_weighted_score(const AccessibilityLayer& layer, const HexDemographics& demo,
                                           Dimension dimension, std::string_view bracket);

struct BracketScore {
  std::string name;
  std::optional<double> score;
  double population = 0.0;

  friend bool operator==(const BracketScore&, const BracketScore&) = default;
};

struct EquityReport {
  Dimension dimension = Dimension::race;
  std::vector<BracketScore> brackets;
  /// max/min over populated brackets; nullopt when unbounded (a populated bracket scores 0 while
  /// another does not) or when no bracket is populated.
  std::optional<double> gap_ratio;

  friend bool operator==(const EquityReport&, const EquityReport&) = default;
};

EquityReport equity_report(const AccessibilityLayer& layer, const HexDemographics& demo, Dimension dimension);

struct CategorySummary {
  PoiCategory category;
  WindowLabel window;
  std::optional<double> score;
};

/// Total-population-weighted score per layer, in input order.
std::vector<CategorySummary> city_summary(std::span<const AccessibilityLayer> layers, const HexDemographics& demo);

}  // namespace hexaccess
