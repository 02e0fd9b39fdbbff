#include "fairreg/dataset.hpp"

#include <cmath>

#include "fairreg/error.hpp"

namespace fairreg {

void Dataset::validate() const {
  const auto n = static_cast<Eigen::Index>(groups.size());
  if (features.rows() != n || responses.size() != n) {
    throw ArgumentError("dataset: features, groups and responses differ in length");
  }
  if (!features.allFinite()) throw ArgumentError("dataset: non-finite feature value");
  if (!responses.allFinite()) throw ArgumentError("dataset: non-finite response value");
}

std::vector<GroupLabel> Dataset::group_labels() const {
  std::vector<GroupLabel> labels;
  for (const auto& [label, rows] : rows_by_group()) labels.push_back(label);
  return labels;
}

std::map<GroupLabel, std::vector<std::size_t>> Dataset::rows_by_group() const {
  std::map<GroupLabel, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < groups.size(); ++i) out[groups[i]].push_back(i);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.features.resize(m, features.cols());
  out.responses.resize(m);
  out.groups.reserve(rows.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
    out.features.row(r) = features.row(src);
    out.responses(r) = responses(src);
    out.groups.push_back(groups[static_cast<std::size_t>(src)]);
  }
  return out;
}

}  // namespace fairreg
