#include "hexaccess/scenario.hpp"

#include "hexaccess/errors.hpp"

#include <algorithm>
#include <map>

namespace hexaccess {

namespace {

bool by_id(const Poi& a, const Poi& b) { return a.id < b.id; }

const Poi* find_poi(std::span<const Poi> sorted, std::string_view id) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), id, [](const Poi& p, std::string_view v) { return p.id < v; });
  if (it == sorted.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<EquityReport> all_reports(const AccessibilityLayer& layer, const HexDemographics& demo) {
  std::vector<EquityReport> out;
  for (auto d : report_dimensions()) out.push_back(equity_report(layer, demo, d));
  return out;
}

}  // namespace

std::vector<Dimension> report_dimensions() {
  return {Dimension::race, Dimension::age_sex, Dimension::income, Dimension::vehicle, Dimension::total};
}

const Catchment* BaselineState::catchment(std::string_view poi_id) const {
  auto it = std::lower_bound(catchments.begin(), catchments.end(), poi_id,
                             [](const Catchment& c, std::string_view v) { return c.poi_id < v; });
  if (it == catchments.end() || it->poi_id != poi_id) return nullptr;
  return &*it;
}

BaselineState make_baseline(std::string city, PoiCategory category, const TimeWindow& window, std::vector<Poi> pois,
                            std::vector<Catchment> catchments, const HexDemographics& demo, const CellFilter& keep,
                            Seconds budget_s, Seconds sample_interval_s) {
  BaselineState state;
  state.city = std::move(city);
  state.category = category;
  state.window = window;
  state.budget_s = budget_s;
  state.sample_interval_s = sample_interval_s;
  std::erase_if(pois, [&](const Poi& p) { return p.category != category; });
  std::sort(pois.begin(), pois.end(), by_id);
  std::erase_if(catchments, [&](const Catchment& c) { return c.category != category || c.window != window.label; });
  std::sort(catchments.begin(), catchments.end(), [](const auto& a, const auto& b) { return a.poi_id < b.poi_id; });
  if (catchments.size() != pois.size()) {
    throw DomainError("baseline for " + std::string(to_string(category)) + " needs one catchment per POI");
  }
  for (std::size_t i = 0; i < pois.size(); ++i) {
    state.ratios.push_back(supply_ratio(pois[i], catchments[i], demo));
  }
  state.pois = std::move(pois);
  state.catchments = std::move(catchments);
  state.model = build_access_model(state.ratios, state.catchments, demo, keep);
  state.layer = evaluate(state.model);
  state.layer.city = state.city;
  state.layer.category = category;
  state.layer.window = window.label;
  state.reports = all_reports(state.layer, demo);
  return state;
}

BaselineState build_baseline(std::string city, PoiCategory category, const TimeWindow& window,
                             std::span<const Poi> pois, const Router& router, const HexDemographics& demo,
                             const CellFilter& keep, Seconds budget_s, Seconds sample_interval_s) {
  std::vector<Poi> mine;
  for (const auto& p : pois) {
    if (p.category == category) mine.push_back(p);
  }
  const TimeWindow windows[] = {window};
  auto batch = catchment_batch(router, mine, windows, budget_s, sample_interval_s);
  if (!batch.errors.empty()) {
    throw DataError("catchment failed for POI " + batch.errors.front().poi_id + ": " + batch.errors.front().message);
  }
  return make_baseline(std::move(city), category, window, std::move(mine), std::move(batch.catchments), demo, keep,
                       budget_s, sample_interval_s);
}

void validate_scenario(const Scenario& scenario, const ScenarioContext& context) {
  for (const auto& id : scenario.removed) {
    if (!find_poi(context.baseline_pois, id)) throw DomainError("removed POI " + id + " is not a baseline POI");
  }
  std::set<std::string> seen;
  for (const auto& p : scenario.added) {
    if (find_poi(context.baseline_pois, p.id)) throw DomainError("added POI id " + p.id + " collides with baseline");
    if (!seen.insert(p.id).second) throw DomainError("added POI id " + p.id + " appears twice");
    if (!(p.supply_units > 0.0)) throw DomainError("added POI " + p.id + " needs positive supply");
    validate(p.location);
    if (!context.extent.contains(p.location)) throw DomainError("added POI " + p.id + " lies outside the city");
  }
}

std::vector<Poi> scenario_pois(const BaselineState& baseline, const Scenario& scenario) {
  std::vector<Poi> out;
  for (const auto& p : baseline.pois) {
    if (!scenario.removed.count(p.id)) out.push_back(p);
  }
  for (const auto& p : scenario.added) {
    if (p.category == baseline.category) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), by_id);
  return out;
}

ScenarioResult apply_scenario(const BaselineState& baseline, const Scenario& scenario, const ScenarioContext& context) {
  validate_scenario(scenario, context);
  const auto& demo = context.demo;
  ScenarioResult result;
  result.baseline_reports = baseline.reports;

  std::vector<Poi> added;
  for (const auto& p : scenario.added) {
    if (p.category == baseline.category) added.push_back(p);
  }
  std::sort(added.begin(), added.end(), by_id);
  for (const auto& p : added) {
    result.added_catchments.push_back(
        compute_catchment(context.router, p, baseline.window, baseline.budget_s, baseline.sample_interval_s));
    result.added_ratios.push_back(supply_ratio(p, result.added_catchments.back(), demo));
  }

  std::vector<const Catchment*> removed;
  std::vector<char> removed_column(baseline.pois.size(), 0);
  for (std::size_t j = 0; j < baseline.pois.size(); ++j) {
    if (scenario.removed.count(baseline.pois[j].id)) {
      removed.push_back(&baseline.catchments[j]);
      removed_column[j] = 1;
    }
  }

  if (added.empty() && removed.empty()) {
    result.layer = baseline.layer;
    result.scenario_reports = baseline.reports;
    return result;
  }

  const auto& model = baseline.model;
  auto in_domain = [&](const HexCellId& cell) { return !context.keep || demo.find(cell) || context.keep(cell); };

  std::vector<HexCellId> affected;
  for (const Catchment* c : removed) affected.insert(affected.end(), c->cells.begin(), c->cells.end());
  for (const auto& c : result.added_catchments) affected.insert(affected.end(), c.cells.begin(), c.cells.end());
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

  // recomputed score per affected cell; nullopt drops the cell from the layer
  std::map<HexCellId, std::optional<double>> updates;
  std::vector<std::pair<std::string_view, double>> covering;
  for (const auto& cell : affected) {
    if (!in_domain(cell)) continue;
    covering.clear();
    auto row = std::lower_bound(model.cells.begin(), model.cells.end(), cell);
    if (row != model.cells.end() && *row == cell) {
      for (Incidence::InnerIterator it(model.incidence, row - model.cells.begin()); it; ++it) {
        if (!removed_column[static_cast<std::size_t>(it.col())]) {
          covering.emplace_back(model.poi_ids[static_cast<std::size_t>(it.col())], model.ratios[it.col()]);
        }
      }
    }
    for (std::size_t a = 0; a < added.size(); ++a) {
      const auto& cells = result.added_catchments[a].cells;
      if (std::binary_search(cells.begin(), cells.end(), cell)) {
        covering.emplace_back(added[a].id, result.added_ratios[a].r_value);
      }
    }
    std::sort(covering.begin(), covering.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    if (covering.empty() && !demo.find(cell)) {
      updates[cell] = std::nullopt;
      continue;
    }
    double sum = 0.0;
    for (const auto& [id, r] : covering) sum += r;
    updates[cell] = sum;
  }

  const auto& base = baseline.layer;
  AccessibilityLayer& layer = result.layer;
  layer.city = base.city;
  layer.category = base.category;
  layer.window = base.window;
  std::vector<double> scores;
  scores.reserve(base.cells.size());
  auto upd = updates.begin();
  auto emit = [&](const HexCellId& cell, double old_score, const std::optional<double>& next) {
    const double now = next.value_or(0.0);
    if (next) {
      layer.cells.push_back(cell);
      scores.push_back(now);
    }
    if (now != old_score) result.delta.emplace_back(cell, now - old_score);
  };
  for (std::size_t i = 0; i < base.cells.size(); ++i) {
    const auto& cell = base.cells[i];
    while (upd != updates.end() && upd->first < cell) {
      emit(upd->first, 0.0, upd->second);
      ++upd;
    }
    const double old_score = base.scores[static_cast<Eigen::Index>(i)];
    if (upd != updates.end() && upd->first == cell) {
      emit(cell, old_score, upd->second);
      ++upd;
    } else {
      layer.cells.push_back(cell);
      scores.push_back(old_score);
    }
  }
  for (; upd != updates.end(); ++upd) emit(upd->first, 0.0, upd->second);
  layer.scores = Eigen::Map<Eigen::VectorXd>(scores.data(), static_cast<Eigen::Index>(scores.size()));

  result.scenario_reports = all_reports(layer, demo);
  return result;
}

std::vector<ReportDiff> diff_reports(std::span<const EquityReport> baseline, std::span<const EquityReport> scenario) {
  if (baseline.size() != scenario.size()) throw DomainError("report lists differ in length");
  std::vector<ReportDiff> out;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const auto& b = baseline[i];
    const auto& s = scenario[i];
    if (b.dimension != s.dimension || b.brackets.size() != s.brackets.size()) {
      throw DomainError("reports differ in dimension or brackets");
    }
    ReportDiff diff;
    diff.dimension = b.dimension;
    for (std::size_t k = 0; k < b.brackets.size(); ++k) {
      if (b.brackets[k].name != s.brackets[k].name) throw DomainError("bracket mismatch: " + b.brackets[k].name);
      BracketDelta d{b.brackets[k].name, std::nullopt};
      if (b.brackets[k].score && s.brackets[k].score) d.delta = *s.brackets[k].score - *b.brackets[k].score;
      diff.brackets.push_back(std::move(d));
    }
    if (b.gap_ratio && s.gap_ratio) diff.gap_ratio_change = *s.gap_ratio - *b.gap_ratio;
    out.push_back(std::move(diff));
  }
  return out;
}

}  // namespace hexaccess
