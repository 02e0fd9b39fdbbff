#pragma once

#include <cstddef>
#include <map>
#include <span>

#include "fairreg/base_learners.hpp"
#include "fairreg/dataset.hpp"
#include "fairreg/fair_pipeline.hpp"
#include "fairreg/losses.hpp"

namespace fairreg {

struct MetricsReport {
  double risk = 0.0;
  double ks = 0.0;
  std::map<GroupLabel, double> per_group_risk;
  std::size_t n = 0;
};

/// sup_t |F_a(t) - F_b(t)| for the empirical CDFs of two samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov-Smirnov parity distance of predictions across groups; the
/// maximum over unordered group pairs when there are more than two groups.
double ks_distance(std::span<const double> values, std::span<const GroupLabel> groups);

/// Mean loss, per-group mean loss and KS of given predictions. KS is 0 when
/// the data holds a single group.
MetricsReport evaluate_predictions(std::span<const double> predictions, const Dataset& data,
                                   const LossSpec& spec);

MetricsReport evaluate(const GroupModels& model, const Dataset& data, const LossSpec& spec);
MetricsReport evaluate(const FairModel& model, const Dataset& data, const LossSpec& spec);

}  // namespace fairreg
