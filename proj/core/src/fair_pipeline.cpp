#include "fairreg/fair_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairreg/error.hpp"
#include "fairreg/random.hpp"
#include "pipeline_internal.hpp"

namespace fairreg {

double eval_monotone(const MonotoneFit& fit, double u) {
  return std::visit(
      [u](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, StepFunction>) {
          return eval_step(f, u);
        } else {
          return eval_spline(f, u);
        }
      },
      fit);
}

double ecdf_value(std::span<const double> sorted_preds, double v) {
  if (sorted_preds.empty()) throw ArgumentError("ecdf_value: empty sample");
  const auto it = std::upper_bound(sorted_preds.begin(), sorted_preds.end(), v);
  return static_cast<double>(it - sorted_preds.begin()) /
         static_cast<double>(sorted_preds.size());
}

void CVConfig::validate() const {
  if (folds < 2) throw ConfigError("cv folds must be >= 2");
  if (degrees.empty() || knot_counts.empty()) throw ConfigError("cv grids must be nonempty");
  for (int d : degrees) {
    if (d < 1) throw ConfigError("cv degrees must be >= 1");
  }
  for (int k : knot_counts) {
    if (k < 0) throw ConfigError("cv knot counts must be >= 0");
  }
  if (!(ks_fraction > 0.0 && ks_fraction <= 1.0)) throw ConfigError("ks_fraction must lie in (0,1]");
}

void QClassConfig::validate() const {
  if (solver == QSolver::Isotonic) {
    if (spline || cv) throw ConfigError("isotonic solver takes no spline or cv settings");
    return;
  }
  if (spline.has_value() == cv.has_value()) {
    throw ConfigError("ispline solver needs exactly one of a spline basis or a cv grid");
  }
  if (spline) spline->validate();
  if (cv) cv->validate();
}

void FairModel::validate() const {
  if (base.models.empty()) throw ArgumentError("fair model: no base models");
  if (base.models.size() != cdf_samples.size()) {
    throw ArgumentError("fair model: base models and cdf samples cover different groups");
  }
  for (const auto& [group, sample] : cdf_samples) {
    if (!base.models.contains(group)) {
      throw ArgumentError("fair model: cdf samples for unknown group '" + group + "'");
    }
    if (sample.empty()) throw ArgumentError("fair model: empty cdf sample for group '" + group + "'");
    if (!std::is_sorted(sample.begin(), sample.end())) {
      throw ArgumentError("fair model: cdf sample for group '" + group + "' is not sorted");
    }
  }
  if (!(base.loss == loss)) throw ArgumentError("fair model: base loss differs from model loss");
}

namespace detail {

std::map<GroupLabel, std::vector<double>> build_cdf_samples(std::span<const double> preds,
                                                            std::span<const GroupLabel> groups) {
  std::map<GroupLabel, std::vector<double>> out;
  for (std::size_t i = 0; i < preds.size(); ++i) out[groups[i]].push_back(preds[i]);
  for (auto& [group, sample] : out) std::sort(sample.begin(), sample.end());
  return out;
}

std::vector<double> rank_transform(const std::map<GroupLabel, std::vector<double>>& cdf_samples,
                                   std::span<const double> preds,
                                   std::span<const GroupLabel> groups) {
  std::vector<double> us(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto it = cdf_samples.find(groups[i]);
    if (it == cdf_samples.end()) throw ArgumentError("unknown group label '" + groups[i] + "'");
    us[i] = ecdf_value(it->second, preds[i]);
  }
  return us;
}

MonotoneFit fit_quantile(std::span<const double> us, std::span<const double> ys,
                         const LossSpec& spec, const QClassConfig& qclass) {
  if (qclass.solver == QSolver::Isotonic) return fit_isotonic(us, ys, spec);
  if (!qclass.spline) throw ConfigError("ispline solver without a resolved basis");
  return fit_ispline(us, ys, spec, *qclass.spline);
}

PreparedFit prepare(const Dataset& train, const LossSpec& spec, const SplitMode& split_mode) {
  train.validate();
  if (train.size() == 0) throw ArgumentError("fit_fair: empty training set");

  PreparedFit out;
  if (split_mode.kind == SplitMode::Kind::Reuse) {
    out.base = fit_groupwise(train, spec);
    out.calibration = train;
  } else {
    if (!(split_mode.fraction > 0.0 && split_mode.fraction < 1.0)) {
      throw ConfigError("split fraction must lie in (0,1)");
    }
    Rng rng(split_mode.seed, 0x5b1f);
    std::vector<std::size_t> est_rows, cal_rows;
    for (auto& [group, rows] : train.rows_by_group()) {
      std::vector<std::size_t> shuffled = rows;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto n_est = static_cast<std::size_t>(
          std::llround(split_mode.fraction * static_cast<double>(shuffled.size())));
      if (n_est == 0 || n_est >= shuffled.size()) {
        throw GroupSizeError("group '" + group + "' is too small to split into estimation and "
                             "calibration samples",
                             group);
      }
      est_rows.insert(est_rows.end(), shuffled.begin(), shuffled.begin() + n_est);
      cal_rows.insert(cal_rows.end(), shuffled.begin() + n_est, shuffled.end());
    }
    std::sort(est_rows.begin(), est_rows.end());
    std::sort(cal_rows.begin(), cal_rows.end());
    out.base = fit_groupwise(train.subset(est_rows), spec);
    out.calibration = train.subset(cal_rows);
  }

  const Eigen::VectorXd preds = out.base.predict(out.calibration);
  const std::span<const double> pred_span(preds.data(), out.calibration.size());
  out.cdf_samples = build_cdf_samples(pred_span, out.calibration.groups);
  out.ranks = rank_transform(out.cdf_samples, pred_span, out.calibration.groups);
  out.responses.assign(out.calibration.responses.data(),
                       out.calibration.responses.data() + out.calibration.size());
  return out;
}

}  // namespace detail

Calibration calibrate(std::span<const double> base_predictions, std::span<const GroupLabel> groups,
                      std::span<const double> responses, const LossSpec& spec,
                      const QClassConfig& qclass) {
  if (base_predictions.size() != groups.size() || groups.size() != responses.size()) {
    throw ArgumentError("calibrate: predictions, groups and responses differ in length");
  }
  if (base_predictions.empty()) throw ArgumentError("calibrate: empty sample");
  if (qclass.cv) throw ConfigError("calibrate: resolve the cv grid before calibrating");
  qclass.validate();
  Calibration cal;
  cal.cdf_samples = detail::build_cdf_samples(base_predictions, groups);
  cal.ranks = detail::rank_transform(cal.cdf_samples, base_predictions, groups);
  cal.quantile = detail::fit_quantile(cal.ranks, responses, spec, qclass);
  return cal;
}

double apply_calibration(const std::map<GroupLabel, std::vector<double>>& cdf_samples,
                         const MonotoneFit& quantile, const LossSpec& spec,
                         double base_prediction, const GroupLabel& group) {
  const auto it = cdf_samples.find(group);
  if (it == cdf_samples.end()) throw ArgumentError("unknown group label '" + group + "'");
  const double v = eval_monotone(quantile, ecdf_value(it->second, base_prediction));
  if (spec.kind() == LossKind::CrossEntropy) {
    return std::clamp(v, kProbabilityClip, 1.0 - kProbabilityClip);
  }
  return v;
}

FairModel fit_fair(const Dataset& train, const LossSpec& spec, const QClassConfig& qclass,
                   const SplitMode& split_mode) {
  qclass.validate();
  QClassConfig resolved = qclass;
  if (qclass.cv) {
    const std::size_t needed =
        std::max(train.dim() + 1, 2 * static_cast<std::size_t>(qclass.cv->folds));
    for (const auto& [group, rows] : train.rows_by_group()) {
      if (rows.size() < needed) {
        throw GroupSizeError("group '" + group + "' has " + std::to_string(rows.size()) +
                                 " rows; cross-validation needs at least " +
                                 std::to_string(needed),
                             group);
      }
    }
    resolved = QClassConfig::ispline(select_cv(train, spec, *qclass.cv, split_mode).best);
  }

  detail::PreparedFit prepared = detail::prepare(train, spec, split_mode);
  FairModel model;
  model.quantile = detail::fit_quantile(prepared.ranks, prepared.responses, spec, resolved);
  model.base = std::move(prepared.base);
  model.cdf_samples = std::move(prepared.cdf_samples);
  model.loss = spec;
  return model;
}

double predict_fair(const FairModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const GroupLabel& group) {
  const double base = model.base.predict(x, group);
  return apply_calibration(model.cdf_samples, model.quantile, model.loss, base, group);
}

Eigen::VectorXd predict_fair(const FairModel& model, const Dataset& data) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out(r) = predict_fair(model, data.features.row(r).transpose(), data.groups[i]);
  }
  return out;
}

}  // namespace fairreg
