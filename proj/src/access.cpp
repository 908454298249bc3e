#include "hexaccess/access.hpp"

#include "hexaccess/errors.hpp"

#include <algorithm>
#include <numeric>

namespace hexaccess {

double catchment_population(std::span<const HexCellId> cells, const HexDemographics& demo) {
  double pop = 0.0;
  for (const auto& cell : cells) pop += demo.total(cell);
  return pop;
}

SupplyRatio supply_ratio(const Poi& poi, const Catchment& catchment, const HexDemographics& demo) {
  if (catchment.poi_id != poi.id) throw DomainError("catchment " + catchment.poi_id + " does not belong to " + poi.id);
  SupplyRatio r;
  r.poi_id = poi.id;
  r.catchment_pop = catchment_population(catchment.cells, demo);
  if (r.catchment_pop > 0.0) {
    r.r_value = poi.supply_units / r.catchment_pop;
  } else {
    r.degenerate = true;
  }
  return r;
}

std::optional<Eigen::Index> AccessibilityLayer::find(const HexCellId& cell) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  if (it == cells.end() || *it != cell) return std::nullopt;
  return static_cast<Eigen::Index>(it - cells.begin());
}

double AccessibilityLayer::score(const HexCellId& cell) const {
  if (auto i = find(cell)) return scores[*i];
  return 0.0;
}

AccessModel build_access_model(std::span<const SupplyRatio> ratios, std::span<const Catchment> catchments,
                               const HexDemographics& demo, const CellFilter& keep) {
  if (ratios.size() != catchments.size()) throw DomainError("ratios and catchments differ in count");
  std::vector<std::size_t> r_order(ratios.size());
  std::vector<std::size_t> c_order(catchments.size());
  std::iota(r_order.begin(), r_order.end(), 0);
  std::iota(c_order.begin(), c_order.end(), 0);
  std::sort(r_order.begin(), r_order.end(), [&](auto a, auto b) { return ratios[a].poi_id < ratios[b].poi_id; });
  std::sort(c_order.begin(), c_order.end(),
            [&](auto a, auto b) { return catchments[a].poi_id < catchments[b].poi_id; });

  AccessModel model;
  const auto n = static_cast<Eigen::Index>(ratios.size());
  model.ratios.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& r = ratios[r_order[j]];
    const auto& c = catchments[c_order[j]];
    if (r.poi_id != c.poi_id) throw DomainError("no catchment for supply ratio of POI " + r.poi_id);
    if (j > 0 && r.poi_id == model.poi_ids.back()) throw DomainError("duplicate POI " + r.poi_id + " in layer input");
    model.poi_ids.push_back(r.poi_id);
    model.ratios[j] = r.r_value;
  }

  std::vector<HexCellId> domain = demo.cells();
  for (const auto& c : catchments) {
    for (const auto& cell : c.cells) {
      if (!keep || demo.find(cell) || keep(cell)) domain.push_back(cell);
    }
  }
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  model.cells = std::move(domain);

  std::vector<Eigen::Triplet<double, int>> triplets;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const auto& cell : catchments[c_order[j]].cells) {
      auto it = std::lower_bound(model.cells.begin(), model.cells.end(), cell);
      if (it != model.cells.end() && *it == cell) {
        triplets.emplace_back(static_cast<int>(it - model.cells.begin()), static_cast<int>(j), 1.0);
      }
    }
  }
  model.incidence.resize(static_cast<Eigen::Index>(model.cells.size()), n);
  model.incidence.setFromTriplets(triplets.begin(), triplets.end());
  return model;
}

double covering_sum(const AccessModel& model, Eigen::Index row) {
  double sum = 0.0;
  for (Incidence::InnerIterator it(model.incidence, row); it; ++it) sum += model.ratios[it.col()];
  return sum;
}

AccessibilityLayer evaluate(const AccessModel& model) {
  AccessibilityLayer layer;
  layer.cells = model.cells;
  layer.scores.resize(static_cast<Eigen::Index>(model.cells.size()));
  for (Eigen::Index h = 0; h < layer.scores.size(); ++h) layer.scores[h] = covering_sum(model, h);
  return layer;
}

AccessibilityLayer accessibility_layer(std::span<const SupplyRatio> ratios, std::span<const Catchment> catchments,
                                       const HexDemographics& demo, const CellFilter& keep) {
  auto layer = evaluate(build_access_model(ratios, catchments, demo, keep));
  if (!catchments.empty()) {
    layer.category = catchments.front().category;
    layer.window = catchments.front().window;
  }
  return layer;
}

namespace {

// Layer scores aligned with the demographic cells (0 where the layer has no entry).
Eigen::VectorXd aligned_scores(const AccessibilityLayer& layer, const HexDemographics& demo) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(demo.size());
  const auto& cells = demo.cells();
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < demo.size(); ++i) {
    while (k < layer.cells.size() && layer.cells[k] < cells[i]) ++k;
    if (k < layer.cells.size() && layer.cells[k] == cells[i]) a[i] = layer.scores[static_cast<Eigen::Index>(k)];
  }
  return a;
}

std::optional<double> weighted_mean(const Eigen::VectorXd& scores, const Eigen::Ref<const Eigen::RowVectorXd>& pop) {
  const double den = pop.sum();
  if (!(den > 0.0)) return std::nullopt;
  return pop.dot(scores.transpose()) / den;
}

}  // namespace

std::optional<double> group_weighted_score(const AccessibilityLayer& layer, const HexDemographics& demo,
                                           Dimension dimension, std::string_view bracket) {
  const auto row = demo.schema().index_of(dimension, bracket);
  return weighted_mean(aligned_scores(layer, demo), demo.counts().row(row));
}

EquityReport equity_report(const AccessibilityLayer& layer, const HexDemographics& demo, Dimension dimension) {
  EquityReport report;
  report.dimension = dimension;
  const Eigen::VectorXd a = aligned_scores(layer, demo);
  const auto& schema = demo.schema();
  std::optional<double> lo, hi;
  for (const auto& name : schema.brackets(dimension)) {
    const auto row = demo.counts().row(schema.index_of(dimension, name));
    BracketScore b{name, weighted_mean(a, row), row.sum()};
    if (b.population > 0.0 && b.score) {
      lo = lo ? std::min(*lo, *b.score) : *b.score;
      hi = hi ? std::max(*hi, *b.score) : *b.score;
    }
    report.brackets.push_back(std::move(b));
  }
  if (lo && hi) {
    if (*hi == *lo) {
      report.gap_ratio = 1.0;
    } else if (*lo > 0.0) {
      report.gap_ratio = *hi / *lo;
    }
  }
  return report;
}

std::vector<CategorySummary> city_summary(std::span<const AccessibilityLayer> layers, const HexDemographics& demo) {
  std::vector<CategorySummary> out;
  for (const auto& layer : layers) {
    out.push_back({layer.category, layer.window, weighted_mean(aligned_scores(layer, demo), demo.totals())});
  }
  return out;
}

}  // namespace hexaccess
