#pragma once

#include "hexaccess/access.hpp"
#include "hexaccess/routing.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace hexaccess {

/// Precomputed state for one (city, category, window); never mutated once built.
struct BaselineState {
  std::string city;
  PoiCategory category = PoiCategory::vaccination_center;
  TimeWindow window;
  Seconds budget_s = kDefaultBudget;
  Seconds sample_interval_s = kDefaultSampleInterval;
  std::vector<Poi> pois;  // this category only, sorted by id
  std::vector<Catchment> catchments;  // aligned with pois
  std::vector<SupplyRatio> ratios;    // aligned with pois
  AccessModel model;
  AccessibilityLayer layer;
  std::vector<EquityReport> reports;  // one per group dimension, then total

  const Catchment* catchment(std::string_view poi_id) const;
};

/// The set of dimensions every report list covers, in order.
std::vector<Dimension> report_dimensions();

/// Builds a baseline from already computed catchments (one per POI of `category` in `pois`).
BaselineState make_baseline(std::string city, PoiCategory category, const TimeWindow& window, std::vector<Poi> pois,
                            std::vector<Catchment> catchments, const HexDemographics& demo, const CellFilter& keep,
                            Seconds budget_s = kDefaultBudget, Seconds sample_interval_s = kDefaultSampleInterval);

/// Computes catchments for every POI of `category` and builds the baseline from scratch.
BaselineState build_baseline(std::string city, PoiCategory category, const TimeWindow& window,
                             std::span<const Poi> pois, const Router& router, const HexDemographics& demo,
                             const CellFilter& keep, Seconds budget_s = kDefaultBudget,
                             Seconds sample_interval_s = kDefaultSampleInterval);

struct Scenario {
  std::string id;
  std::string city;
  std::vector<Poi> added;        // origin = scenario
  std::set<std::string> removed;  // baseline POI ids
  std::int64_t created_at = 0;    // unix seconds

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// City-wide facts a scenario is validated and evaluated against.
struct ScenarioContext {
  const Router& router;
  const HexDemographics& demo;
  std::span<const Poi> baseline_pois;  // every category, sorted by id
  GeoBox extent;
  CellFilter keep;
};

/// Throws DomainError when a removed id is not a baseline POI, an added id collides with a baseline
/// or another added POI, or an added POI lies outside the city extent.
void validate_scenario(const Scenario& scenario, const ScenarioContext& context);

struct ScenarioResult {
  AccessibilityLayer layer;
  std::vector<std::pair<HexCellId, double>> delta;  // scenario - baseline, nonzero entries, sorted
  std::vector<EquityReport> baseline_reports;
  std::vector<EquityReport> scenario_reports;
  std::vector<Catchment> added_catchments;
  std::vector<SupplyRatio> added_ratios;
};

/// Overlays the scenario's adds/removals of this baseline's category. Only cells inside affected
/// catchments are recomputed, with the same summation order as a full rebuild, so the resulting
/// layer is bit-identical to build_baseline over the scenario's POI set.
ScenarioResult apply_scenario(const BaselineState& baseline, const Scenario& scenario, const ScenarioContext& context);

/// Baseline POIs of one category with the scenario applied, sorted by id.
std::vector<Poi> scenario_pois(const BaselineState& baseline, const Scenario& scenario);

struct BracketDelta {
  std::string name;
  std::optional<double> delta;  // nullopt when either side has no score
};

struct ReportDiff {
  Dimension dimension = Dimension::race;
  std::vector<BracketDelta> brackets;
  std::optional<double> gap_ratio_change;
};

/// Element-wise scenario - baseline. Throws DomainError when dimensions or brackets differ.
std::vector<ReportDiff> diff_reports(std::span<const EquityReport> baseline, std::span<const EquityReport> scenario);

}  // namespace hexaccess
