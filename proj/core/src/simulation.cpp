#include "fairreg/simulation.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "fairreg/error.hpp"
#include "fairreg/fair_pipeline.hpp"
#include "fairreg/metrics.hpp"
#include "fairreg/normal.hpp"
#include "fairreg/random.hpp"

namespace fairreg {

namespace {

constexpr int kRobustDim = 8;
const double kRobustBeta[kRobustDim] = {3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0};
const double kShiftBeta[2] = {1.0, 0.5};

Eigen::MatrixXd robust_cholesky() {
  Eigen::MatrixXd sigma(kRobustDim, kRobustDim);
  for (int i = 0; i < kRobustDim; ++i) {
    for (int j = 0; j < kRobustDim; ++j) sigma(i, j) = std::pow(0.5, std::abs(i - j));
  }
  return Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
}

void fill_robust(Dataset& d, std::size_t n, double a, Rng& rng, const Eigen::MatrixXd& chol,
                 bool balanced) {
  d.features.resize(static_cast<Eigen::Index>(n), kRobustDim);
  d.responses.resize(static_cast<Eigen::Index>(n));
  d.groups.resize(n);
  Eigen::VectorXd z(kRobustDim);
  const double eps_scale = 1.0 / std::sqrt(kMixtureVariance);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k < kRobustDim; ++k) z(k) = rng.normal();
    const Eigen::VectorXd x = chol * z;
    d.features.row(r) = x.transpose();
    const int s = balanced ? (i < n / 2 ? 0 : 1) : (rng.bernoulli(0.5) ? 1 : 0);
    const double v = rng.uniform() < 0.9 ? rng.normal() : 15.0 * rng.normal();
    double y = 1.0 + a * s + kRobustSigma * eps_scale * v;
    for (int k = 0; k < kRobustDim; ++k) y += kRobustBeta[k] * x(k);
    d.responses(r) = y;
    d.groups[i] = std::to_string(s);
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_errorof(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Base: return "base";
    case Method::FairIsotonic: return "fair_isotonic";
    case Method::FairISpline: return "fair_ispline";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::Base, Method::FairIsotonic, Method::FairISpline}) {
    if (to_string(m) == name) return m;
  }
  throw ArgumentError("unknown method '" + name + "'");
}

void RobustSimConfig::validate() const {
  if (n_test == 0 || n_test % 2 != 0) throw ConfigError("n_test must be a positive even number");
  if (n_train < 2 * (kRobustDim + 1)) throw ConfigError("n_train too small for the 8-feature model");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (!(huber_m > 0.0)) throw ConfigError("huber_m must be positive");
  if (methods.empty()) throw ConfigError("no methods requested");
  if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
}

SimulatedSplit gen_robust(const RobustSimConfig& config, std::uint64_t seed) {
  config.validate();
  const Eigen::MatrixXd chol = robust_cholesky();
  SimulatedSplit out;
  Rng train_rng(seed, 1);
  Rng test_rng(seed, 2);
  fill_robust(out.train, config.n_train, config.a, train_rng, chol, false);
  fill_robust(out.test, config.n_test, config.a, test_rng, chol, true);
  return out;
}

Dataset gen_shift_squared(std::size_t n, double a, double sigma, std::uint64_t seed) {
  Rng rng(seed, 3);
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), 2);
  d.responses.resize(static_cast<Eigen::Index>(n));
  d.groups.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const int s = static_cast<int>(i % 2);
    const double x0 = rng.normal(), x1 = rng.normal();
    d.features(r, 0) = x0;
    d.features(r, 1) = x1;
    d.responses(r) = kShiftBeta[0] * x0 + kShiftBeta[1] * x1 + a * s + sigma * rng.normal();
    d.groups[i] = std::to_string(s);
  }
  return d;
}

double shift_latent_quantile(double u, int group, double a) {
  const double scale = std::hypot(kShiftBeta[0], kShiftBeta[1]);
  return scale * normal_quantile(u) + a * group;
}

ExperimentResult run_experiment(const RobustSimConfig& config) {
  config.validate();
  const LossSpec huber = LossSpec::huber(config.huber_m);

  CVConfig cv;
  cv.folds = config.cv_folds;
  if (!config.full_cv_grid) {
    cv.degrees = {1, 2, 3};
    cv.knot_counts = {0, 2, 4};
  }

  ExperimentResult result;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    RepetitionRecord record;
    record.repetition = rep;
    const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    try {
      const SimulatedSplit data = gen_robust(config, rep_seed);
      const GroupModels base = fit_groupwise(data.train, huber);
      for (Method method : config.methods) {
        MetricsReport report;
        switch (method) {
          case Method::Base: report = evaluate(base, data.test, huber); break;
          case Method::FairIsotonic:
            report = evaluate(fit_fair(data.train, huber, QClassConfig::isotonic()), data.test,
                              huber);
            break;
          case Method::FairISpline: {
            cv.seed = rep_seed;
            report = evaluate(fit_fair(data.train, huber, QClassConfig::ispline_cv(cv)),
                              data.test, huber);
            break;
          }
        }
        record.scores[method] = {report.risk, report.ks};
      }
    } catch (const Error& e) {
      record.failed = true;
      record.error = e.what();
      record.scores.clear();
      ++result.failures;
    }
    result.repetitions.push_back(std::move(record));
  }

  for (Method method : config.methods) {
    std::vector<double> risks, kss;
    for (const RepetitionRecord& r : result.repetitions) {
      if (r.failed) continue;
      risks.push_back(r.scores.at(method).risk);
      kss.push_back(r.scores.at(method).ks);
    }
    if (risks.empty()) continue;
    const int n = static_cast<int>(risks.size());
    result.rows.push_back({to_string(method), "risk", mean_of(risks), std_errorof(risks), n});
    result.rows.push_back({to_string(method), "ks", mean_of(kss), std_errorof(kss), n});
  }
  return result;
}

std::string experiment_to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "method,metric,mean,stderr,n_reps\n";
  out << std::setprecision(17);
  for (const ExperimentRow& row : result.rows) {
    out << row.method << ',' << row.metric << ',' << row.mean << ',' << row.std_error << ','
        << row.n_reps << '\n';
  }
  return out.str();
}

}  // namespace fairreg
