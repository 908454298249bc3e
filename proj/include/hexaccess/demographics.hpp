#pragma once

#include "hexaccess/hexgrid.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexaccess {

/// `total` is a single-bracket pseudo-dimension covering the whole population.
enum class Dimension { race, age_sex, income, vehicle, total };

inline constexpr std::array<Dimension, 4> kGroupDimensions = {Dimension::race, Dimension::age_sex,
                                                              Dimension::income, Dimension::vehicle};

std::string_view to_string(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view name);

/// Bracket names per dimension and the flat vector layout derived from them:
/// [total, race..., age_sex..., income..., vehicle...].
class DemographicSchema {
 public:
  DemographicSchema();
  DemographicSchema(std::vector<std::string> race, std::vector<std::string> age_sex,
                    std::vector<std::string> income, std::vector<std::string> vehicle);

  Eigen::Index size() const noexcept { return size_; }
  const std::vector<std::string>& brackets(Dimension d) const;
  Eigen::Index offset(Dimension d) const;
  /// Throws NotFoundError for an unknown bracket.
  Eigen::Index index_of(Dimension d, std::string_view bracket) const;

  friend bool operator==(const DemographicSchema&, const DemographicSchema&) = default;

 private:
  void layout();

  std::vector<std::string> total_{"all"};
  std::vector<std::string> race_;
  std::vector<std::string> age_sex_;
  std::vector<std::string> income_;
  std::vector<std::string> vehicle_;
  std::array<Eigen::Index, 5> offsets_{};
  Eigen::Index size_ = 0;
};

/// Fractional person counts laid out per DemographicSchema.
template <typename Scalar = double>
using DemographicVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Throws DataError when a count is negative or a dimension does not sum to the total within `slack`.
void check_demographics(const DemographicSchema& schema, const DemographicVector<>& v, double slack,
                        std::string_view what);

/// Per-cell demographic vectors. Cells are sorted; column i of counts() belongs to cells()[i].
class HexDemographics {
 public:
  HexDemographics() = default;
  HexDemographics(DemographicSchema schema, std::vector<HexCellId> cells, Eigen::MatrixXd counts);
  static HexDemographics from_map(DemographicSchema schema, const std::map<HexCellId, DemographicVector<>>& cells);

  const DemographicSchema& schema() const noexcept { return schema_; }
  const std::vector<HexCellId>& cells() const noexcept { return cells_; }
  const Eigen::MatrixXd& counts() const noexcept { return counts_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(cells_.size()); }

  std::optional<Eigen::Index> find(const HexCellId& cell) const;
  /// Zero when the cell carries no data.
  double total(const HexCellId& cell) const;
  auto totals() const { return counts_.row(0); }
  auto column(Eigen::Index i) const { return counts_.col(i); }

  friend bool operator==(const HexDemographics& a, const HexDemographics& b) {
    return a.schema_ == b.schema_ && a.cells_ == b.cells_ && a.counts_.rows() == b.counts_.rows() &&
           a.counts_.cols() == b.counts_.cols() && a.counts_ == b.counts_;
  }

 private:
  DemographicSchema schema_;
  std::vector<HexCellId> cells_;
  Eigen::MatrixXd counts_;
};

}  // namespace hexaccess
