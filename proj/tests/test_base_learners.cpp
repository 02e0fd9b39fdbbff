#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fairreg/base_learners.hpp"
#include "fairreg/error.hpp"

using namespace fairreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd params(const LinearModel& m) {
  VectorXd b(m.weights.size() + 1);
  b(0) = m.intercept;
  b.tail(m.weights.size()) = m.weights;
  return b;
}

MatrixXd design(const MatrixXd& x) {
  MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

double mean_check_loss(const MatrixXd& a, const VectorXd& y, const VectorXd& beta, double tau) {
  const VectorXd r = y - a * beta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += r(i) >= 0 ? tau * r(i) : (tau - 1.0) * r(i);
  return s / static_cast<double>(r.size());
}

// Projected-free subgradient descent with a 1/sqrt(k) step, keeping the best
// iterate seen.
VectorXd subgradient_oracle(const MatrixXd& a, const VectorXd& y, double tau, int iterations) {
  VectorXd beta = VectorXd::Zero(a.cols());
  VectorXd best = beta;
  double best_value = mean_check_loss(a, y, beta, tau);
  for (int k = 1; k <= iterations; ++k) {
    const VectorXd r = y - a * beta;
    VectorXd g = VectorXd::Zero(a.cols());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double s = r(i) > 0 ? -tau : (r(i) < 0 ? 1.0 - tau : 0.0);
      g += s * a.row(i).transpose();
    }
    g /= static_cast<double>(r.size());
    beta -= (0.5 / std::sqrt(static_cast<double>(k))) * g;
    const double v = mean_check_loss(a, y, beta, tau);
    if (v < best_value) {
      best_value = v;
      best = beta;
    }
  }
  return best;
}

// Plain Newton on the mean Poisson negative log-likelihood.
VectorXd poisson_newton_oracle(const MatrixXd& a, const VectorXd& y) {
  VectorXd beta = VectorXd::Zero(a.cols());
  for (int it = 0; it < 100; ++it) {
    const VectorXd mu = (a * beta).array().exp();
    const VectorXd g = a.transpose() * (mu - y);
    const MatrixXd h = a.transpose() * mu.asDiagonal() * a;
    const VectorXd step = h.ldlt().solve(g);
    beta -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-13) break;
  }
  return beta;
}

Dataset make_groups(const std::vector<double>& intercepts, int per_group, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const int n = per_group * static_cast<int>(intercepts.size());
  Dataset d;
  d.features.resize(n, 1);
  d.responses.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(i) % intercepts.size();
    const double x = z(rng);
    d.features(i, 0) = x;
    d.responses(i) = intercepts[g] + 1.5 * x + 0.5 * z(rng);
    d.groups.push_back("g" + std::to_string(g));
  }
  return d;
}

}  // namespace

TEST(FitLinear, ExactLinearDataSquared) {
  MatrixXd x(6, 1);
  x << -2, -1, 0, 1, 2, 3;
  const VectorXd y = (1.0 + 2.0 * x.col(0).array()).matrix();
  const LinearModel m = fit_linear(x, y, LossSpec::squared());
  EXPECT_NEAR(m.intercept, 1.0, 1e-8);
  EXPECT_NEAR(m.weights(0), 2.0, 1e-8);
  EXPECT_EQ(m.link, Link::Identity);
}

TEST(FitLinear, ExactLinearDataAllLosses) {
  MatrixXd x(8, 1);
  x << -2, -1, 0, 1, 2, 3, 4, 5;
  const VectorXd y = (1.0 + 2.0 * x.col(0).array()).matrix();
  for (const LossSpec& spec : {LossSpec::absolute(), LossSpec::pinball(0.3), LossSpec::huber(1.0)}) {
    const LinearModel m = fit_linear(x, y, spec);
    EXPECT_NEAR(m.intercept, 1.0, 1e-5) << to_string(spec.kind());
    EXPECT_NEAR(m.weights(0), 2.0, 1e-5) << to_string(spec.kind());
  }
}

TEST(FitLinear, MedianRegressionMatchesSubgradientOracle) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> z;
  std::student_t_distribution<double> noise(3.0);
  const int n = 2000;
  MatrixXd x(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    y(i) = x(i, 0) + noise(rng);
  }
  const LinearModel m = fit_linear(x, y, LossSpec::pinball(0.5));
  EXPECT_NEAR(m.weights(0), 1.0, 0.1);
  const MatrixXd a = design(x);
  const VectorXd oracle = subgradient_oracle(a, y, 0.5, 20000);
  EXPECT_NEAR(m.weights(0), oracle(1), 1e-2);
  EXPECT_LE(mean_check_loss(a, y, params(m), 0.5), mean_check_loss(a, y, oracle, 0.5) + 1e-6);
}

TEST(FitLinear, PinballQuantileCoverage) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  const int n = 3000;
  MatrixXd x(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    y(i) = 2.0 + x(i, 0) + z(rng);
  }
  const LinearModel m = fit_linear(x, y, LossSpec::pinball(0.8));
  int below = 0;
  for (int i = 0; i < n; ++i) below += y(i) <= m.linear_predictor(x.row(i).transpose()) ? 1 : 0;
  // A fitted check-loss hyperplane leaves about tau * n points below it.
  EXPECT_NEAR(below / static_cast<double>(n), 0.8, 0.01);
}

TEST(FitLinear, PoissonRecoversParameters) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 5000;
  MatrixXd x(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = unif(rng);
    y(i) = std::poisson_distribution<int>(std::exp(0.5 + x(i, 0)))(rng);
  }
  const LinearModel m = fit_linear(x, y, LossSpec::poisson());
  EXPECT_NEAR(m.intercept, 0.5, 0.1);
  EXPECT_NEAR(m.weights(0), 1.0, 0.1);
  const VectorXd oracle = poisson_newton_oracle(design(x), y);
  EXPECT_NEAR((params(m) - oracle).lpNorm<Eigen::Infinity>(), 0.0, 1e-7);
}

TEST(FitLinear, HuberScoreEquationsHold) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> z;
  std::cauchy_distribution<double> heavy;
  const int n = 1000;
  MatrixXd x(n, 2);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    x(i, 1) = z(rng);
    y(i) = 1.0 + x(i, 0) - 2.0 * x(i, 1) + heavy(rng);
  }
  const LossSpec spec = LossSpec::huber(1.345);
  const LinearModel m = fit_linear(x, y, spec);
  const MatrixXd a = design(x);
  const VectorXd r = y - a * params(m);
  VectorXd score = VectorXd::Zero(3);
  for (int i = 0; i < n; ++i) score += huber_psi(r(i), spec.m()) * a.row(i).transpose();
  EXPECT_LE((score / n).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_NEAR(m.weights(1), -2.0, 0.2);
}

TEST(FitLinear, LogisticScoreEquationsHold) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 2000;
  MatrixXd x(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    y(i) = unif(rng) < 1.0 / (1.0 + std::exp(-(0.3 + 1.2 * x(i, 0)))) ? 1.0 : 0.0;
  }
  const LinearModel m = fit_linear(x, y, LossSpec::cross_entropy());
  EXPECT_EQ(m.link, Link::Logistic);
  VectorXd score = VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) {
    const double p = m.predict(x.row(i).transpose());
    ASSERT_GT(p, 0.0);
    ASSERT_LT(p, 1.0);
    score(0) += p - y(i);
    score(1) += (p - y(i)) * x(i, 0);
  }
  EXPECT_LE((score / n).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_NEAR(m.weights(0), 1.2, 0.2);
}

TEST(FitLinear, SquaredMatchesQrSolution) {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> z;
  const int n = 300, d = 5;
  MatrixXd x(n, d);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = z(rng);
    y(i) = z(rng) + x.row(i).sum();
  }
  const MatrixXd a = design(x);
  const VectorXd qr = a.colPivHouseholderQr().solve(y);
  EXPECT_LE((params(fit_linear(x, y, LossSpec::squared())) - qr).norm(), 1e-8);
}

TEST(FitLinear, SingularDesignUsesJitter) {
  MatrixXd x(5, 2);
  x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
  const VectorXd y = x.col(0);
  const LinearModel m = fit_linear(x, y, LossSpec::squared());
  EXPECT_TRUE(params(m).allFinite());
  EXPECT_NEAR(m.linear_predictor(x.row(2).transpose()), 3.0, 1e-6);
}

TEST(FitLinear, ObjectiveHistoryDescends) {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 500;
  MatrixXd x(n, 2);
  VectorXd y_cont(n), y_count(n), y_label(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    x(i, 1) = z(rng);
    y_cont(i) = 1.0 + x(i, 0) + 3.0 * z(rng) * z(rng);
    y_count(i) = std::poisson_distribution<int>(std::exp(0.2 * x(i, 1)))(rng);
    y_label(i) = unif(rng) < 0.3 ? 1.0 : 0.0;
  }
  const std::vector<std::pair<LossSpec, VectorXd>> cases{
      {LossSpec::absolute(), y_cont},     {LossSpec::pinball(0.2), y_cont},
      {LossSpec::huber(1.0), y_cont},     {LossSpec::poisson(), y_count},
      {LossSpec::cross_entropy(), y_label}};
  for (const auto& [spec, y] : cases) {
    const LinearFitReport r = fit_linear_report(x, y, spec);
    for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
      ASSERT_LE(r.objective_history[k],
                r.objective_history[k - 1] + 1e-12 * std::abs(r.objective_history[k - 1]))
          << to_string(spec.kind()) << " iteration " << k;
    }
  }
}

TEST(FitLinear, RowPermutationInvariance) {
  std::mt19937_64 rng(48);
  std::normal_distribution<double> z;
  const int n = 400;
  MatrixXd x(n, 2);
  VectorXd y(n), counts(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    x(i, 1) = z(rng);
    y(i) = x(i, 0) - x(i, 1) + z(rng);
    counts(i) = std::poisson_distribution<int>(2.0)(rng);
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  MatrixXd xp(n, 2);
  VectorXd yp(n), cp(n);
  for (int i = 0; i < n; ++i) {
    xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    yp(i) = y(perm[static_cast<std::size_t>(i)]);
    cp(i) = counts(perm[static_cast<std::size_t>(i)]);
  }
  for (const LossSpec& spec : {LossSpec::squared(), LossSpec::pinball(0.4), LossSpec::huber(0.8)}) {
    const VectorXd a = params(fit_linear(x, y, spec));
    const VectorXd b = params(fit_linear(xp, yp, spec));
    EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), 1e-10) << to_string(spec.kind());
  }
  EXPECT_LE((params(fit_linear(x, counts, LossSpec::poisson())) -
             params(fit_linear(xp, cp, LossSpec::poisson())))
                .lpNorm<Eigen::Infinity>(),
            1e-10);
}

TEST(FitLinear, Errors) {
  MatrixXd x(2, 2);
  x << 1, 2, 3, 4;
  VectorXd y(2);
  y << 1, 2;
  EXPECT_THROW(fit_linear(x, y, LossSpec::squared()), ArgumentError);
  MatrixXd x1(3, 1);
  x1 << 1, 2, 3;
  VectorXd y_short(2);
  y_short << 1, 2;
  EXPECT_THROW(fit_linear(x1, y_short, LossSpec::squared()), ArgumentError);
  VectorXd negative(3);
  negative << 1, -1, 2;
  EXPECT_THROW(fit_linear(x1, negative, LossSpec::poisson()), DomainError);
  EXPECT_THROW(fit_linear(x1, negative, LossSpec::cross_entropy()), DomainError);
  VectorXd nan(3);
  nan << 1, std::nan(""), 2;
  EXPECT_THROW(fit_linear(x1, nan, LossSpec::squared()), ArgumentError);
}

TEST(FitGroupwise, IdenticalGroupsGiveIdenticalModels) {
  Dataset base = make_groups({0.0}, 200, 49);
  Dataset d;
  d.features.resize(400, 1);
  d.responses.resize(400);
  for (int i = 0; i < 200; ++i) {
    for (int g = 0; g < 2; ++g) {
      d.features(2 * i + g, 0) = base.features(i, 0);
      d.responses(2 * i + g) = base.responses(i);
      d.groups.push_back(g == 0 ? "a" : "b");
    }
  }
  for (const LossSpec& spec : {LossSpec::squared(), LossSpec::absolute(), LossSpec::huber(1.0)}) {
    const GroupModels gm = fit_groupwise(d, spec);
    EXPECT_EQ(params(gm.at("a")), params(gm.at("b")));
  }
}

TEST(FitGroupwise, SingleGroupMatchesFitLinear) {
  const Dataset d = make_groups({1.0}, 100, 50);
  const GroupModels gm = fit_groupwise(d, LossSpec::squared());
  ASSERT_EQ(gm.models.size(), 1u);
  EXPECT_EQ(params(gm.at("g0")), params(fit_linear(d.features, d.responses, LossSpec::squared())));
}

TEST(FitGroupwise, RecoversPerGroupIntercepts) {
  const Dataset d = make_groups({-2.0, 0.5, 4.0}, 3000, 51);
  const GroupModels gm = fit_groupwise(d, LossSpec::squared());
  EXPECT_NEAR(gm.at("g0").intercept, -2.0, 0.1);
  EXPECT_NEAR(gm.at("g1").intercept, 0.5, 0.1);
  EXPECT_NEAR(gm.at("g2").intercept, 4.0, 0.1);
  const VectorXd preds = gm.predict(d);
  EXPECT_DOUBLE_EQ(preds(4), gm.predict(d.features.row(4).transpose(), d.groups[4]));
}

TEST(FitGroupwise, ErrorsNameTheGroup) {
  Dataset d = make_groups({0.0, 1.0}, 5, 52);
  d.groups[1] = "tiny";
  // "tiny" now has one row, below d + 1 = 2.
  try {
    fit_groupwise(d, LossSpec::squared());
    FAIL() << "expected GroupSizeError";
  } catch (const GroupSizeError& e) {
    EXPECT_EQ(e.group(), "tiny");
  }
  const GroupModels gm = fit_groupwise(make_groups({0.0, 1.0}, 5, 53), LossSpec::squared());
  EXPECT_THROW(gm.at("missing"), ArgumentError);
}
