#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fairreg/base_learners.hpp"
#include "fairreg/dataset.hpp"
#include "fairreg/isotonic.hpp"
#include "fairreg/losses.hpp"
#include "fairreg/splines.hpp"

namespace fairreg {

/// Fitted common quantile function: a step function (isotonic solver) or an
/// I-spline expansion.
using MonotoneFit = std::variant<StepFunction, SplineFit>;

double eval_monotone(const MonotoneFit& fit, double u);

/// Empirical CDF (1/n) #{p <= v} of an ascending sample.
double ecdf_value(std::span<const double> sorted_preds, double v);

struct CVConfig {
  int folds = 5;
  std::vector<int> degrees{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> knot_counts{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double ks_fraction = 0.10;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class QSolver { Isotonic, ISpline };

/// Step-2 function class. spline is set iff solver is ISpline without CV.
struct QClassConfig {
  QSolver solver = QSolver::Isotonic;
  std::optional<SplineBasisConfig> spline;
  std::optional<CVConfig> cv;

  static QClassConfig isotonic() { return {}; }
  static QClassConfig ispline(SplineBasisConfig config) {
    return {QSolver::ISpline, config, std::nullopt};
  }
  static QClassConfig ispline_cv(CVConfig cv) { return {QSolver::ISpline, std::nullopt, cv}; }

  void validate() const;
};

/// Reuse: Step 1 and the calibration of Step 2 both use all rows.
/// Split: a stratified seeded split; `fraction` of each group fits the base
/// models and the remainder calibrates.
struct SplitMode {
  enum class Kind { Reuse, Split };
  Kind kind = Kind::Reuse;
  double fraction = 0.5;
  std::uint64_t seed = 0;

  static SplitMode reuse() { return {}; }
  static SplitMode split(double fraction, std::uint64_t seed) {
    return {Kind::Split, fraction, seed};
  }
};

/// Output of Step 2 on a calibration sample.
struct Calibration {
  std::map<GroupLabel, std::vector<double>> cdf_samples;
  MonotoneFit quantile = StepFunction({0.0}, {0.0});
  /// U_i = F_s(f(x_i)) for each calibration row, in input order.
  std::vector<double> ranks;
};

/// Step 2 given any base predictions: builds the per-group empirical CDFs,
/// maps every prediction to its within-group rank U_i and fits the common
/// quantile function on (U_i, y_i). qclass must be resolved (no CV). This is
/// the entry point for base learners other than the built-in linear models.
Calibration calibrate(std::span<const double> base_predictions, std::span<const GroupLabel> groups,
                      std::span<const double> responses, const LossSpec& spec,
                      const QClassConfig& qclass);

/// Q(F_s(base_prediction)); cross-entropy outputs are clipped to
/// [kProbabilityClip, 1 - kProbabilityClip].
double apply_calibration(const std::map<GroupLabel, std::vector<double>>& cdf_samples,
                         const MonotoneFit& quantile, const LossSpec& spec,
                         double base_prediction, const GroupLabel& group);

struct FairModel {
  GroupModels base;
  std::map<GroupLabel, std::vector<double>> cdf_samples;
  MonotoneFit quantile = StepFunction({0.0}, {0.0});
  LossSpec loss = LossSpec::squared();
  /// Column names of the training features; empty when unknown.
  std::vector<std::string> feature_names;

  void validate() const;
};

/// Two-step fair estimator: group-wise base fit, rank transform with the
/// calibration-sample ECDFs, common monotone quantile fit. Under CV the spline
/// basis is chosen by select_cv first.
FairModel fit_fair(const Dataset& train, const LossSpec& spec, const QClassConfig& qclass,
                   const SplitMode& split_mode = SplitMode::reuse());

double predict_fair(const FairModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const GroupLabel& group);
Eigen::VectorXd predict_fair(const FairModel& model, const Dataset& data);

struct CvCandidate {
  SplineBasisConfig config;
  bool feasible = false;
  double mean_ks = 0.0;
  double mean_risk = 0.0;
  bool passed_ks_filter = false;
  std::string failure;
};

struct CvResult {
  SplineBasisConfig best;
  double ks_threshold = 0.0;
  std::vector<CvCandidate> candidates;
};

/// Selection rule on a scored candidate table: keep feasible candidates whose
/// mean KS is at most the lower ks_fraction-quantile of all feasible mean KS
/// values (inclusive, so at least one survives), then take the smallest mean
/// risk; ties go to the lower degree, then fewer knots. Fills
/// passed_ks_filter. Throws ConfigError when no candidate is feasible.
CvResult select_from_candidates(std::vector<CvCandidate> candidates, double ks_fraction);

/// Group-stratified K-fold CV over degrees x knot_counts, scoring held-out KS
/// and mean risk of the fair predictor, followed by select_from_candidates.
CvResult select_cv(const Dataset& train, const LossSpec& spec, const CVConfig& cv,
                   const SplitMode& split_mode = SplitMode::reuse());

}  // namespace fairreg
