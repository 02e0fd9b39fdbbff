#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fairreg {

using GroupLabel = std::string;

/// (X, S, Y) triples: an n x d feature matrix, one protected-group label per
/// row and a real response per row.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<GroupLabel> groups;
  Eigen::VectorXd responses;

  std::size_t size() const noexcept { return groups.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }

  /// Equal lengths and finite entries; throws ArgumentError otherwise.
  void validate() const;

  /// Distinct labels in ascending order.
  std::vector<GroupLabel> group_labels() const;

  /// Row indices per group, each list ascending.
  std::map<GroupLabel, std::vector<std::size_t>> rows_by_group() const;

  Dataset subset(std::span<const std::size_t> rows) const;
};

}  // namespace fairreg
