#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fairreg/error.hpp"
#include "fairreg/fair_pipeline.hpp"
#include "fairreg/metrics.hpp"

using namespace fairreg;

namespace {

// Direct definition: count at every pooled value.
double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  double sup = 0.0;
  for (double t : pooled) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(a.size());
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(b.size());
    sup = std::max(sup, std::abs(fa - fb));
  }
  return sup;
}

Dataset small_dataset(const std::vector<double>& ys, const std::vector<GroupLabel>& groups) {
  Dataset d;
  d.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ys.size()), 1);
  d.responses = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  d.groups = groups;
  return d;
}

}  // namespace

TEST(KsDistance, Examples) {
  const std::vector<GroupLabel> g{"0", "0", "1", "1"};
  EXPECT_EQ(ks_distance(std::vector<double>{1, 2, 1, 2}, g), 0.0);
  EXPECT_EQ(ks_distance(std::vector<double>{1, 2, 3, 4}, g), 1.0);
  EXPECT_DOUBLE_EQ(ks_distance(std::vector<double>{1, 3, 2, 4}, g), 0.5);
}

TEST(KsDistance, UnequalSizesAndTies) {
  const std::vector<double> a{1, 1, 2}, b{1, 2, 2, 2};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b), brute_ks(a, b));
  EXPECT_NEAR(ks_two_sample(a, b), 2.0 / 3.0 - 0.25, 1e-15);
}

TEST(KsDistance, MatchesBruteForce) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    const int na = std::uniform_int_distribution<int>(1, 30)(rng);
    const int nb = std::uniform_int_distribution<int>(1, 30)(rng);
    std::vector<double> a, b;
    std::uniform_int_distribution<int> coarse(0, 10);
    for (int i = 0; i < na; ++i) a.push_back(coarse(rng));
    for (int i = 0; i < nb; ++i) b.push_back(coarse(rng) + 0.5 * (trial % 2));
    ASSERT_DOUBLE_EQ(ks_two_sample(a, b), brute_ks(a, b));
  }
}

TEST(KsDistance, Invariances) {
  std::mt19937_64 rng(92);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    std::vector<GroupLabel> g, swapped;
    for (int i = 0; i < 50; ++i) {
      const bool one = z(rng) > 0;
      v.push_back(z(rng) + (one ? 0.5 : 0.0));
      g.push_back(one ? "1" : "0");
      swapped.push_back(one ? "0" : "1");
    }
    if (std::count(g.begin(), g.end(), "1") == 0 || std::count(g.begin(), g.end(), "0") == 0) continue;
    const double ks = ks_distance(v, g);
    ASSERT_GE(ks, 0.0);
    ASSERT_LE(ks, 1.0);
    ASSERT_EQ(ks_distance(v, swapped), ks);
    std::vector<double> moved;
    for (double x : v) moved.push_back(std::exp(x) * 3.0 - 1.0);
    ASSERT_EQ(ks_distance(moved, g), ks);
  }
}

TEST(KsDistance, ZeroIffSameScaledMultiset) {
  const std::vector<double> a{1, 2}, b{1, 1, 2, 2};
  EXPECT_EQ(ks_two_sample(a, b), 0.0);
  const std::vector<double> c{1, 2, 2};
  EXPECT_GT(ks_two_sample(a, c), 0.0);
}

TEST(KsDistance, MultiGroupTakesWorstPair) {
  const std::vector<double> v{1, 2, 1, 2, 5, 6};
  const std::vector<GroupLabel> g{"a", "a", "b", "b", "c", "c"};
  EXPECT_EQ(ks_distance(v, g), 1.0);
}

TEST(KsDistance, Errors) {
  const std::vector<double> v{1, 2};
  EXPECT_THROW(ks_distance(v, std::vector<GroupLabel>{"a", "a"}), ArgumentError);
  EXPECT_THROW(ks_distance(v, std::vector<GroupLabel>{"a"}), ArgumentError);
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, v), ArgumentError);
}

TEST(Evaluate, PerfectAndConstantPredictors) {
  const Dataset d = small_dataset({1, 2, 3, 4}, {"0", "1", "0", "1"});
  const std::vector<double> perfect{1, 2, 3, 4};
  const MetricsReport p = evaluate_predictions(perfect, d, LossSpec::squared());
  EXPECT_EQ(p.risk, 0.0);
  EXPECT_EQ(p.n, 4u);
  const std::vector<double> constant(4, 2.5);
  const MetricsReport c = evaluate_predictions(constant, d, LossSpec::squared());
  EXPECT_EQ(c.ks, 0.0);
  EXPECT_DOUBLE_EQ(c.risk, (2.25 + 0.25 + 0.25 + 2.25) / 4);
  EXPECT_DOUBLE_EQ(c.per_group_risk.at("0"), (2.25 + 0.25) / 2);
}

TEST(Evaluate, FourPointFixtureReport) {
  Dataset d = small_dataset({1, 3, 10, 4}, {"a", "a", "b", "b"});
  d.features.col(0) << 0, 1, 0, 1;
  const FairModel m = fit_fair(d, LossSpec::squared(), QClassConfig::isotonic());
  // Fair predictions (2.5, 6.5, 6.5, 2.5): squared errors 2.25, 12.25, 12.25, 2.25.
  const MetricsReport fair = evaluate(m, d, LossSpec::squared());
  EXPECT_NEAR(fair.risk, 29.0 / 4, 1e-9);
  EXPECT_NEAR(fair.per_group_risk.at("a"), 7.25, 1e-9);
  EXPECT_EQ(fair.ks, 0.0);
  const MetricsReport base = evaluate(m.base, d, LossSpec::squared());
  EXPECT_NEAR(base.risk, 0.0, 1e-12);
  EXPECT_EQ(base.ks, 1.0);
}

TEST(Evaluate, SingleGroupReportsZeroKs) {
  const Dataset d = small_dataset({1, 2, 3}, {"x", "x", "x"});
  const std::vector<double> preds{0, 0, 0};
  EXPECT_EQ(evaluate_predictions(preds, d, LossSpec::absolute()).ks, 0.0);
  EXPECT_DOUBLE_EQ(evaluate_predictions(preds, d, LossSpec::absolute()).risk, 2.0);
}

TEST(Evaluate, ClipsCrossEntropyPredictions) {
  const Dataset d = small_dataset({1, 0}, {"0", "1"});
  const std::vector<double> preds{1.0, 0.0};
  const MetricsReport r = evaluate_predictions(preds, d, LossSpec::cross_entropy());
  EXPECT_NEAR(r.risk, -std::log(1.0 - kProbabilityClip), 1e-12);
}

TEST(Evaluate, Errors) {
  const Dataset d = small_dataset({1, 2}, {"0", "1"});
  EXPECT_THROW(evaluate_predictions(std::vector<double>{1.0}, d, LossSpec::squared()), ArgumentError);
  const Dataset empty = small_dataset({}, {});
  EXPECT_THROW(evaluate_predictions(std::vector<double>{}, empty, LossSpec::squared()), ArgumentError);
}
