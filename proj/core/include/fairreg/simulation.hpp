#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairreg/dataset.hpp"

namespace fairreg {

enum class Method { Base, FairIsotonic, FairISpline };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Robust-regression study:
///   Y = 1 + X'beta + a S + sigma eps,  X ~ N_8(0, Sigma), Sigma_ij = 0.5^|i-j|,
///   beta = (3, 1.5, 0, 0, 2, 0, 0, 0), sigma = 9.67, S ~ Bernoulli(0.5),
///   eps = V / sqrt(23.4), V ~ 0.9 N(0,1) + 0.1 N(0,225).
struct RobustSimConfig {
  std::size_t n_train = 500;
  std::size_t n_test = 10000;
  double a = 5.0;
  std::uint64_t seed = 0;
  int repetitions = 200;
  double huber_m = 13.01;
  std::vector<Method> methods{Method::Base, Method::FairIsotonic, Method::FairISpline};
  /// Degrees 1..10 x knots 0..10 instead of the reduced {1,2,3} x {0,2,4}.
  bool full_cv_grid = false;
  int cv_folds = 5;

  void validate() const;
};

inline constexpr double kRobustSigma = 9.67;
inline constexpr double kMixtureVariance = 0.9 + 0.1 * 225.0;

struct SimulatedSplit {
  Dataset train;
  Dataset test;
};

/// Training groups are Bernoulli(0.5); the test set has exactly n_test / 2
/// rows per group. Deterministic in (config, seed).
SimulatedSplit gen_robust(const RobustSimConfig& config, std::uint64_t seed);
inline SimulatedSplit gen_robust(const RobustSimConfig& config) {
  return gen_robust(config, config.seed);
}

/// Shift model Y = X'beta + a S + sigma Z with X ~ N_2(0, I), beta = (1, 0.5)
/// and exactly balanced groups. The latent regression f*(x,s) = x'beta + a s
/// has group quantile Q_s*(u) = |beta| Phi^{-1}(u) + a s.
Dataset gen_shift_squared(std::size_t n, double a, double sigma, std::uint64_t seed);

/// Q_s*(u) of the shift model (group s in {0, 1}).
double shift_latent_quantile(double u, int group, double a);

struct MethodScores {
  double risk = 0.0;
  double ks = 0.0;
};

struct RepetitionRecord {
  int repetition = 0;
  bool failed = false;
  std::string error;
  std::map<Method, MethodScores> scores;
};

struct ExperimentRow {
  std::string method;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;
  int n_reps = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<RepetitionRecord> repetitions;
  int failures = 0;
};

/// Per repetition: draw data, fit the group-wise Huber regression and the
/// requested fair variants on the training set, then score Huber risk and KS
/// on the test set. Failed repetitions are counted and left out of the
/// aggregates.
ExperimentResult run_experiment(const RobustSimConfig& config);

/// CSV with header method,metric,mean,stderr,n_reps.
std::string experiment_to_csv(const ExperimentResult& result);

}  // namespace fairreg
