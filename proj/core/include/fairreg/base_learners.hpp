#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fairreg/dataset.hpp"
#include "fairreg/losses.hpp"

namespace fairreg {

/// Response map applied to the linear predictor.
enum class Link { Identity, Logistic };

/// Link used by fit_linear for a loss: Logistic for cross-entropy (the model
/// is fitted on the log-odds), Identity otherwise.
Link link_for(const LossSpec& spec) noexcept;

struct LinearModel {
  double intercept = 0.0;
  Eigen::VectorXd weights;
  Link link = Link::Identity;

  double linear_predictor(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return intercept + weights.dot(x);
  }
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct LinearFitReport {
  LinearModel model;
  int iterations = 0;
  /// Objective after each iteration (smoothed check loss for the IRLS path).
  std::vector<double> objective_history;
};

/// Empirical risk minimizer over affine predictors.
///
/// Squared: normal equations (ridge jitter 1e-8 when the Gram matrix is
/// singular). Huber, PoissonNLL, CrossEntropy: damped Newton with
/// step-halving, gradient tolerance 1e-8, at most 200 iterations.
/// Absolute, Pinball: iteratively reweighted least squares on the check loss
/// smoothed at eps = 1e-6, at most 500 iterations, parameter tolerance 1e-8.
/// Throws ConvergenceError (with the last iterate) at an iteration cap.
LinearFitReport fit_linear_report(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const LossSpec& spec);

LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LossSpec& spec);

/// One linear model per protected group.
struct GroupModels {
  LossSpec loss = LossSpec::squared();
  std::map<GroupLabel, LinearModel> models;

  const LinearModel& at(const GroupLabel& group) const;
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x, const GroupLabel& group) const;
  /// Predictions for every row of data.
  Eigen::VectorXd predict(const Dataset& data) const;
};

/// fit_linear on each group's rows. Throws GroupSizeError naming the first
/// group with fewer than d + 1 rows.
GroupModels fit_groupwise(const Dataset& data, const LossSpec& spec);

}  // namespace fairreg
