#pragma once

#include <map>
#include <span>
#include <vector>

#include "fairreg/fair_pipeline.hpp"

namespace fairreg::detail {

/// Step 1 plus the rank transform, shared by fit_fair and the CV loop.
struct PreparedFit {
  GroupModels base;
  Dataset calibration;
  std::map<GroupLabel, std::vector<double>> cdf_samples;
  std::vector<double> ranks;
  std::vector<double> responses;
};

std::map<GroupLabel, std::vector<double>> build_cdf_samples(std::span<const double> preds,
                                                            std::span<const GroupLabel> groups);

std::vector<double> rank_transform(const std::map<GroupLabel, std::vector<double>>& cdf_samples,
                                   std::span<const double> preds,
                                   std::span<const GroupLabel> groups);

MonotoneFit fit_quantile(std::span<const double> us, std::span<const double> ys,
                         const LossSpec& spec, const QClassConfig& qclass);

PreparedFit prepare(const Dataset& train, const LossSpec& spec, const SplitMode& split_mode);

}  // namespace fairreg::detail
