#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sertk/metrics/classification.hpp"
#include "sertk/metrics/regression.hpp"

namespace sertk::metrics {
namespace {

ConfusionCounts from_rows(std::vector<std::vector<std::size_t>> rows) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.size(); ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  ConfusionCounts cm(names);
  cm.counts = std::move(rows);
  return cm;
}

TEST(Accuracy, CountedToyCases) {
  const auto cm = confusion(std::vector<std::string>{"x", "x", "x", "x", "x", "y", "y", "y", "y", "y"},
                            std::vector<std::string>{"x", "x", "x", "x", "y", "y", "y", "x", "x", "y"});
  EXPECT_EQ(cm.total(), 10u);
  EXPECT_DOUBLE_EQ(unweighted_accuracy(cm), 0.7);
  EXPECT_EQ(unweighted_accuracy(from_rows({{0, 3}, {2, 0}})), 0.0);
  EXPECT_EQ(unweighted_accuracy(from_rows({{3, 0}, {0, 2}})), 1.0);
  EXPECT_THROW(unweighted_accuracy(from_rows({{0, 0}, {0, 0}})), InputError);
}

TEST(Accuracy, ImbalancedMajorityPredictor) {
  const auto cm = from_rows({{90, 0}, {10, 0}});
  EXPECT_DOUBLE_EQ(weighted_accuracy_paper(cm), 0.9);
  EXPECT_DOUBLE_EQ(balanced_accuracy(cm), 0.5);
  const auto balanced = from_rows({{4, 1}, {1, 4}});
  EXPECT_DOUBLE_EQ(weighted_accuracy_paper(balanced), balanced_accuracy(balanced));
  EXPECT_THROW(balanced_accuracy(from_rows({{3, 0}, {0, 0}})), InputError);
}

TEST(Accuracy, LiteralWeightedEqualsUnweighted) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> count(0, 30);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<std::size_t>> rows(4, std::vector<std::size_t>(4));
    for (auto& r : rows)
      for (auto& v : r) v = count(rng);
    rows[0][0] += 1;
    const auto cm = from_rows(rows);
    EXPECT_EQ(weighted_accuracy_paper(cm), unweighted_accuracy(cm));
  }
}

TEST(Confusion, IntegerAndStringFormsAgree) {
  const auto a = confusion(std::vector<int>{0, 1, 2, 2}, std::vector<int>{0, 2, 2, 1}, 3);
  const auto b = confusion(std::vector<std::string>{"0", "1", "2", "2"}, std::vector<std::string>{"0", "2", "2", "1"});
  EXPECT_EQ(a.counts, b.counts);
  std::size_t support = 0;
  for (std::size_t c = 0; c < a.size(); ++c) support += a.support(c);
  EXPECT_EQ(support, a.total());
  EXPECT_THROW(confusion(std::vector<std::string>{"a"}, std::vector<std::string>{}), InputError);
}

TEST(Prf, HandWorkedThreeClass) {
  const auto cm = from_rows({{3, 1, 0}, {1, 2, 1}, {0, 0, 2}});
  const auto macro = precision_recall_f1(cm);
  EXPECT_DOUBLE_EQ(macro.per_class[0].precision, 0.75);
  EXPECT_DOUBLE_EQ(macro.per_class[1].precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(macro.per_class[1].recall, 0.5);
  EXPECT_DOUBLE_EQ(macro.per_class[1].f1, 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(macro.per_class[2].recall, 1.0);
  EXPECT_DOUBLE_EQ(macro.per_class[2].f1, 0.8);
  EXPECT_NEAR(macro.f1, (0.75 + 4.0 / 7.0 + 0.8) / 3.0, 1e-15);
  const auto weighted = precision_recall_f1(cm, Averaging::kWeighted);
  EXPECT_NEAR(weighted.f1, 0.4 * 0.75 + 0.4 * 4.0 / 7.0 + 0.2 * 0.8, 1e-15);
  EXPECT_NEAR(weighted.recall, unweighted_accuracy(cm), 1e-15);
}

TEST(Prf, PerfectAndNeverPredicted) {
  for (const auto& p : precision_recall_f1(from_rows({{2, 0}, {0, 3}})).per_class) {
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.f1, 1.0);
  }
  const auto r = precision_recall_f1(from_rows({{5, 0}, {3, 0}}));
  EXPECT_EQ(r.per_class[1].precision, 0.0);
  EXPECT_EQ(r.per_class[1].f1, 0.0);
}

TEST(Prf, HarmonicMeanBound) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> count(1, 20);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<std::size_t>> rows(3, std::vector<std::size_t>(3));
    for (auto& r : rows)
      for (auto& v : r) v = count(rng);
    for (const auto& p : precision_recall_f1(from_rows(rows)).per_class) {
      EXPECT_LE(p.precision * p.recall, p.f1 * std::max(p.precision, p.recall) + 1e-15);
      EXPECT_LE(p.f1, std::max(p.precision, p.recall) + 1e-15);
      EXPECT_GE(p.f1, std::min(p.precision, p.recall) - 1e-15);
    }
  }
}

TEST(Regression, ErrorMagnitudes) {
  const std::vector<double> t{1.0, -2.0, 3.5, 0.0};
  std::vector<double> p = t;
  EXPECT_EQ(mse(p, t), 0.0);
  for (auto& v : p) v += 2.0;
  EXPECT_DOUBLE_EQ(mse(p, t), 4.0);
  EXPECT_DOUBLE_EQ(mae(p, t), 2.0);
  EXPECT_THROW(mse(std::vector<double>{1.0}, t), InputError);
}

TEST(Regression, MatchesDirectLoops) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> p(500), t(500);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = g(rng);
    t[i] = g(rng);
  }
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    se += (p[i] - t[i]) * (p[i] - t[i]);
    ae += std::abs(p[i] - t[i]);
  }
  EXPECT_NEAR(mse(p, t), se / 500.0, 1e-12);
  EXPECT_NEAR(mae(p, t), ae / 500.0, 1e-12);
}

TEST(Regression, CorrelationClosedForms) {
  std::vector<double> t(101), p(101), neg(101);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(i) - 50.0;
    p[i] = 2.0 * t[i];
    neg[i] = -t[i];
  }
  EXPECT_NEAR(pcc(t, t), 1.0, 1e-12);
  EXPECT_NEAR(ccc(t, t), 1.0, 1e-12);
  EXPECT_NEAR(pcc(p, t), 1.0, 1e-12);
  EXPECT_NEAR(ccc(p, t), 0.8, 1e-12);
  EXPECT_NEAR(pcc(neg, t), -1.0, 1e-12);
  EXPECT_LT(ccc(neg, t), 0.0);
  EXPECT_THROW(pcc(std::vector<double>(5, 1.0), std::vector<double>{1, 2, 3, 4, 5}), InputError);
}

TEST(Regression, CccEqualsPccWhenMomentsMatch) {
  // Same multiset of values, different order: identical mean and variance.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> t(50);
    for (auto& v : t) v = g(rng);
    std::vector<double> p = t;
    std::shuffle(p.begin(), p.begin() + 10, rng);
    EXPECT_NEAR(ccc(p, t), pcc(p, t), 1e-12);
  }
}

TEST(Regression, PermutationInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> p(40), t(40);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = u(rng);
    t[i] = u(rng);
  }
  std::vector<std::size_t> idx(40);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<double> pp, tp;
  for (auto i : idx) {
    pp.push_back(p[i]);
    tp.push_back(t[i]);
  }
  EXPECT_NEAR(mse(pp, tp), mse(p, t), 1e-12);
  EXPECT_NEAR(mae(pp, tp), mae(p, t), 1e-12);
  EXPECT_NEAR(pcc(pp, tp), pcc(p, t), 1e-12);
  EXPECT_NEAR(ccc(pp, tp), ccc(p, t), 1e-12);
  EXPECT_EQ(acc_from_scores(pp, tp, AccMode::kAcc7), acc_from_scores(p, t, AccMode::kAcc7));
  EXPECT_EQ(acc_from_scores(pp, tp, AccMode::kAcc2), acc_from_scores(p, t, AccMode::kAcc2));
}

TEST(AccScores, RoundingAndSigns) {
  const std::vector<double> ints{-3, -1, 0, 2, 3};
  EXPECT_EQ(acc_from_scores(ints, ints, AccMode::kAcc7), 1.0);
  EXPECT_EQ(acc_from_scores(ints, ints, AccMode::kAcc2), 1.0);
  EXPECT_EQ(acc_from_scores(std::vector<double>{1.4}, std::vector<double>{1.0}, AccMode::kAcc7), 1.0);
  EXPECT_EQ(acc_from_scores(std::vector<double>{1.6}, std::vector<double>{1.0}, AccMode::kAcc7), 0.0);
  EXPECT_EQ(acc_from_scores(std::vector<double>{-2.5}, std::vector<double>{-3.0}, AccMode::kAcc7), 1.0);
  EXPECT_EQ(acc_from_scores(std::vector<double>{-0.2}, std::vector<double>{0.4}, AccMode::kAcc2), 0.0);
  EXPECT_THROW(acc_from_scores(std::vector<double>{3.2}, std::vector<double>{1.0}, AccMode::kAcc7), InputError);
  EXPECT_THROW(acc_from_scores(std::vector<double>{1.0}, std::vector<double>{0.0}, AccMode::kAcc2), InputError);
  EXPECT_EQ(parse_acc_mode("acc7"), AccMode::kAcc7);
  EXPECT_THROW(parse_acc_mode("acc5"), InputError);
}

}  // namespace
}  // namespace sertk::metrics
