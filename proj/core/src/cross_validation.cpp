#include <algorithm>
#include <cmath>
#include <optional>

#include "fairreg/error.hpp"
#include "fairreg/fair_pipeline.hpp"
#include "fairreg/metrics.hpp"
#include "fairreg/random.hpp"
#include "pipeline_internal.hpp"

namespace fairreg {

namespace {

struct FoldData {
  std::optional<detail::PreparedFit> prepared;
  std::string failure;
  std::vector<double> test_base;
  Dataset test;
};

std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed) {
  std::vector<int> assignment(data.size(), 0);
  Rng rng(seed, 0xc5);
  for (const auto& [group, rows] : data.rows_by_group()) {
    std::vector<std::size_t> shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t pos = 0; pos < shuffled.size(); ++pos) {
      assignment[shuffled[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    }
  }
  return assignment;
}

}  // namespace

CvResult select_from_candidates(std::vector<CvCandidate> candidates, double ks_fraction) {
  if (!(ks_fraction > 0.0 && ks_fraction <= 1.0)) throw ConfigError("ks_fraction must lie in (0,1]");
  std::vector<double> ks_values;
  for (const CvCandidate& c : candidates) {
    if (c.feasible) ks_values.push_back(c.mean_ks);
  }
  if (ks_values.empty()) throw ConfigError("cross-validation: no feasible candidate");
  std::sort(ks_values.begin(), ks_values.end());

  // Lower empirical quantile; the slack keeps e.g. 0.1 * 30 from rounding up.
  const double rank = std::ceil(ks_fraction * static_cast<double>(ks_values.size()) - 1e-9);
  const auto index = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
  CvResult result;
  result.ks_threshold = ks_values[std::min(index, ks_values.size() - 1)];

  const CvCandidate* best = nullptr;
  for (CvCandidate& c : candidates) {
    c.passed_ks_filter = c.feasible && c.mean_ks <= result.ks_threshold;
    if (!c.passed_ks_filter) continue;
    const bool better =
        best == nullptr || c.mean_risk < best->mean_risk ||
        (c.mean_risk == best->mean_risk &&
         (c.config.degree < best->config.degree ||
          (c.config.degree == best->config.degree &&
           c.config.n_interior_knots < best->config.n_interior_knots)));
    if (better) best = &c;
  }
  result.best = best->config;
  result.candidates = std::move(candidates);
  return result;
}

CvResult select_cv(const Dataset& train, const LossSpec& spec, const CVConfig& cv,
                   const SplitMode& split_mode) {
  cv.validate();
  train.validate();
  const std::vector<int> assignment = stratified_folds(train, cv.folds, cv.seed);

  std::vector<FoldData> folds(static_cast<std::size_t>(cv.folds));
  for (int f = 0; f < cv.folds; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < train.size(); ++i) {
      (assignment[i] == f ? test_rows : train_rows).push_back(i);
    }
    FoldData& fold = folds[static_cast<std::size_t>(f)];
    fold.test = train.subset(test_rows);
    try {
      fold.prepared = detail::prepare(train.subset(train_rows), spec, split_mode);
      const Eigen::VectorXd base = fold.prepared->base.predict(fold.test);
      fold.test_base.assign(base.data(), base.data() + fold.test.size());
    } catch (const Error& e) {
      fold.prepared.reset();
      fold.failure = e.what();
    }
  }

  std::vector<CvCandidate> candidates;
  for (int degree : cv.degrees) {
    for (int knots : cv.knot_counts) {
      CvCandidate cand;
      cand.config = SplineBasisConfig{degree, knots};
      cand.feasible = true;
      double ks_sum = 0.0, risk_sum = 0.0;
      for (const FoldData& fold : folds) {
        if (!fold.prepared) {
          cand.feasible = false;
          cand.failure = fold.failure;
          break;
        }
        try {
          const MonotoneFit quantile =
              fit_ispline(fold.prepared->ranks, fold.prepared->responses, spec, cand.config);
          std::vector<double> preds(fold.test.size());
          for (std::size_t i = 0; i < preds.size(); ++i) {
            preds[i] = apply_calibration(fold.prepared->cdf_samples, quantile, spec,
                                         fold.test_base[i], fold.test.groups[i]);
          }
          const MetricsReport report = evaluate_predictions(preds, fold.test, spec);
          ks_sum += report.ks;
          risk_sum += report.risk;
        } catch (const Error& e) {
          cand.feasible = false;
          cand.failure = e.what();
          break;
        }
      }
      if (cand.feasible) {
        cand.mean_ks = ks_sum / cv.folds;
        cand.mean_risk = risk_sum / cv.folds;
      }
      candidates.push_back(std::move(cand));
    }
  }
  return select_from_candidates(std::move(candidates), cv.ks_fraction);
}

}  // namespace fairreg
