#include "fairreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairreg/error.hpp"

namespace fairreg {

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_two_sample: empty sample");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const auto na = static_cast<double>(xs.size());
  const auto nb = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  // Both ECDFs only jump at sample points, so the pooled values suffice.
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

double ks_distance(std::span<const double> values, std::span<const GroupLabel> groups) {
  if (values.size() != groups.size()) throw ArgumentError("ks_distance: length mismatch");
  std::map<GroupLabel, std::vector<double>> by_group;
  for (std::size_t i = 0; i < values.size(); ++i) by_group[groups[i]].push_back(values[i]);
  if (by_group.size() < 2) throw ArgumentError("ks_distance: need at least two groups");
  double worst = 0.0;
  for (auto it = by_group.begin(); it != by_group.end(); ++it) {
    for (auto jt = std::next(it); jt != by_group.end(); ++jt) {
      worst = std::max(worst, ks_two_sample(it->second, jt->second));
    }
  }
  return worst;
}

MetricsReport evaluate_predictions(std::span<const double> predictions, const Dataset& data,
                                   const LossSpec& spec) {
  if (data.size() == 0) throw ArgumentError("evaluate: empty dataset");
  if (predictions.size() != data.size()) throw ArgumentError("evaluate: length mismatch");
  MetricsReport report;
  report.n = data.size();
  std::map<GroupLabel, std::pair<double, std::size_t>> sums;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double q = predictions[i];
    if (spec.kind() == LossKind::CrossEntropy) {
      q = std::clamp(q, kProbabilityClip, 1.0 - kProbabilityClip);
    }
    const double l = loss_value(spec, q, data.responses(static_cast<Eigen::Index>(i)));
    total += l;
    auto& [sum, count] = sums[data.groups[i]];
    sum += l;
    ++count;
  }
  report.risk = total / static_cast<double>(data.size());
  for (const auto& [group, sc] : sums) {
    report.per_group_risk[group] = sc.first / static_cast<double>(sc.second);
  }
  report.ks = sums.size() >= 2 ? ks_distance(predictions, data.groups) : 0.0;
  return report;
}

MetricsReport evaluate(const GroupModels& model, const Dataset& data, const LossSpec& spec) {
  const Eigen::VectorXd preds = model.predict(data);
  return evaluate_predictions(std::span<const double>(preds.data(), data.size()), data, spec);
}

MetricsReport evaluate(const FairModel& model, const Dataset& data, const LossSpec& spec) {
  const Eigen::VectorXd preds = predict_fair(model, data);
  return evaluate_predictions(std::span<const double>(preds.data(), data.size()), data, spec);
}

}  // namespace fairreg
