#include <gtest/gtest.h>

#include <random>

#include "sertk/oracle/oracles.hpp"
#include "sertk/oracle/selftest.hpp"
#include "sertk/semisl/baselines.hpp"
#include "sertk/semisl/classifier.hpp"
#include "sertk/semisl/loop.hpp"
#include "sertk/semisl/pool_builder.hpp"
#include "sertk/semisl/selection.hpp"
#include "sertk/semisl/synthetic.hpp"

namespace sertk::semisl {
namespace {

BlobConfig small_blobs(std::uint64_t seed, double separation = 1.0) {
  return {.n = 400, .dim = 16, .n_classes = 4, .separation = separation, .seed = seed};
}

// Always predicts one fixed class, whatever it was trained on.
class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(int cls) : cls_(cls) {}
  void fit(const Mat&, std::span<const int>, int n_classes) override { k_ = n_classes; }
  Mat predict_proba(const Mat& x) const override {
    Mat p = Mat::Zero(x.rows(), k_);
    p.col(cls_).setOnes();
    return p;
  }

 private:
  int cls_;
  int k_ = 0;
};

TEST(Vote, StrictMajority) {
  const auto v = majority_vote({{{"u1", "A"}, {"u2", "A"}, {"u3", "A"}},
                                {{"u1", "A"}, {"u2", "B"}, {"u3", "A"}},
                                {{"u1", "A"}, {"u2", "A"}, {"u3", "B"}}});
  EXPECT_EQ(*v.at("u1"), "A");
  EXPECT_EQ(*v.at("u2"), "A");
  const auto tie = majority_vote({{{"u", "A"}}, {{"u", "B"}}});
  EXPECT_FALSE(tie.at("u").has_value());
}

TEST(Select, AgreementRule) {
  const std::vector<PseudoLabelRecord> recs{{"a", "Happy", "Happy", {}}, {"b", "Happy", "Sad", {}}, {"c", "Sad", {}, {}}};
  const auto s = select_high_confidence(recs);
  EXPECT_EQ(s.high, (LabelMap{{"a", "Happy"}}));
  EXPECT_EQ(s.low, (std::vector<std::string>{"b", "c"}));
  auto reversed = recs;
  std::reverse(reversed.begin(), reversed.end());
  const auto r = select_high_confidence(reversed);
  EXPECT_EQ(r.high, s.high);
  EXPECT_EQ(r.low, s.low);
  EXPECT_THROW(select_high_confidence({{"x", "", "A", {}}}), InputError);
}

TEST(Classifier, SeparableBlobsFitTrainingSet) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.3);
  Mat x(200, 2);
  std::vector<int> y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    const double c = i % 2 == 0 ? -2.0 : 2.0;
    x(i, 0) = c + g(rng);
    x(i, 1) = c + g(rng);
  }
  const auto m = train_builtin(x, y, 2, {});
  const auto pred = predict(m, x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred.labels[i] == y[i] ? 1 : 0;
  EXPECT_GE(static_cast<double>(hits) / 200.0, 0.99);
  for (Eigen::Index i = 0; i < pred.probabilities.rows(); ++i)
    EXPECT_NEAR(pred.probabilities.row(i).sum(), 1.0, 1e-12);
  EXPECT_THROW(train_builtin(x, std::vector<int>(200, 0), 1, {}), InputError);
}

TEST(Classifier, ConflictingDuplicatesStayFinite) {
  const Mat x = Mat::Ones(10, 3);
  std::vector<int> y(10);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  const auto m = train_builtin(x, y, 2, {});
  const auto [loss, grad] = loss_and_gradient(with_bias(standardize(m, x)), y, m.weights, 0.0);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_GT(loss, 0.5);
  EXPECT_TRUE(m.weights.allFinite());
}

TEST(Classifier, ZeroEpochsIsUniform) {
  std::mt19937_64 rng(2);
  const Mat x = oracle::detail::random_matrix(rng, 20, 4);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 3);
  const auto m = train_builtin(x, y, 3, {.epochs = 0});
  EXPECT_TRUE(predict_proba(m, x).isApprox(Mat::Constant(20, 3, 1.0 / 3.0), 1e-15));
}

TEST(Classifier, MiniBatchIsSeeded) {
  std::mt19937_64 rng(3);
  const Mat x = oracle::detail::random_matrix(rng, 60, 4);
  std::vector<int> y(60);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 3);
  const TrainConfig cfg{.epochs = 20, .batch_size = 16, .seed = 9};
  EXPECT_EQ(train_builtin(x, y, 3, cfg).weights, train_builtin(x, y, 3, cfg).weights);
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> label(0, 3);
  for (int t = 0; t < 10; ++t) {
    const Mat xb = with_bias(oracle::detail::random_matrix(rng, 8, 5));
    std::vector<int> y(8);
    for (auto& v : y) v = label(rng);
    const Mat w = 0.3 * oracle::detail::random_matrix(rng, 6, 4);
    const auto [loss, grad] = loss_and_gradient(xb, y, w, 1e-2);
    const auto f = [&](const Mat& wp) { return loss_and_gradient(xb, y, wp, 1e-2).first; };
    EXPECT_LT(oracle::gradient_check(f, w, grad), 1e-4);
  }
}

TEST(Loop, SingleIteration) {
  const auto task = make_blob_task(small_blobs(1));
  const auto r = run_loop(task.pool, {.max_iters = 1}, logistic_factory());
  ASSERT_EQ(r.history.iterations.size(), 1u);
  EXPECT_EQ(r.history.iterations[0].promoted, 0u);
  EXPECT_EQ(r.history.final_ua(), r.history.initial_ua());
}

TEST(Loop, NoPromotionStopsByPatience) {
  auto task = make_blob_task(small_blobs(2));
  auto& p = task.pool;
  for (auto r : p.low_conf) {
    p.acoustic[r] = 1;
    p.linguistic[r] = 2;
  }
  const auto r = run_loop(p, {.max_iters = 40, .patience = 2}, [] { return std::make_unique<ConstantClassifier>(0); });
  EXPECT_LE(r.history.iterations.size(), 3u);
  for (const auto& it : r.history.iterations) {
    EXPECT_EQ(it.promoted, 0u);
    EXPECT_EQ(it.low_conf, p.low_conf.size());
  }
}

TEST(Loop, ConservationMonotonicityAndDeterminism) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto task = make_blob_task(small_blobs(seed, 0.5));
    const LoopConfig cfg{.max_iters = 10, .patience = 3, .seed = seed};
    const auto a = run_loop(task.pool, cfg, logistic_factory());
    const auto& h = a.history;
    std::size_t prev_low = std::numeric_limits<std::size_t>::max();
    for (const auto& it : h.iterations) {
      EXPECT_EQ(it.labeled + it.high_conf + it.low_conf + it.removed, h.universe);
      EXPECT_LE(it.low_conf, prev_low);
      prev_low = it.low_conf;
    }
    EXPECT_GE(h.final_ua(), h.initial_ua());
    EXPECT_EQ(history_csv(h), history_csv(run_loop(task.pool, cfg, logistic_factory()).history));
  }
}

TEST(Loop, Errors) {
  auto task = make_blob_task(small_blobs(6));
  auto no_labeled = task.pool;
  no_labeled.labeled.clear();
  EXPECT_THROW(run_loop(no_labeled, {}, logistic_factory()), InputError);

  auto missing_class = task.pool;
  std::erase_if(missing_class.labeled, [&](std::size_t r) { return missing_class.gold[r] == 3; });
  for (auto r : missing_class.high_conf)
    if (missing_class.pseudo[r] == 3) missing_class.pseudo[r] = 0;
  EXPECT_THROW(run_loop(missing_class, {}, logistic_factory()), InputError);
  EXPECT_THROW(run_loop(task.pool, {.max_iters = 0}, logistic_factory()), InputError);
}

TEST(Baselines, MergeDecisions) {
  Vec p(4);
  p << 0.1, 0.1, 0.3, 0.5;
  EXPECT_EQ(merge_decisions(p, p, 0.5), 3);
  EXPECT_FALSE(merge_decisions(p, p, 0.6));
  EXPECT_EQ(parse_baseline("co_training"), Baseline::kCoTraining);
  EXPECT_THROW(parse_baseline("mixmatch"), InputError);
}

TEST(Baselines, ThresholdAboveOneReducesToLimited) {
  const auto task = make_blob_task(small_blobs(7));
  const auto views = split_views(task);
  const auto limited = run_baseline(task.pool, Baseline::kSupervisedLimited, logistic_factory());
  const auto merged = run_baseline(task.pool, Baseline::kDecisionMerging, logistic_factory(), {.threshold = 1.01}, &views);
  EXPECT_EQ(merged.promoted, 0u);
  EXPECT_EQ(merged.validation_ua, limited.validation_ua);
  EXPECT_THROW(run_baseline(task.pool, Baseline::kCoTraining, logistic_factory()), InputError);
}

TEST(Baselines, FullSupervisionIsUpperBound) {
  const auto task = make_blob_task(small_blobs(8, 3.0));
  const auto views = split_views(task);
  const auto full = run_baseline(task.pool, Baseline::kSupervisedFull, logistic_factory());
  for (auto kind : {Baseline::kSupervisedLimited, Baseline::kDecisionMerging, Baseline::kCoTraining}) {
    const auto r = run_baseline(task.pool, kind, logistic_factory(), {}, &views);
    EXPECT_GE(full.validation_ua, r.validation_ua) << to_string(kind);
  }
  const auto loop = run_loop(task.pool, {.seed = 8}, logistic_factory());
  EXPECT_GE(full.validation_ua, loop.history.final_ua());
}

PoolInputs tiny_inputs() {
  PoolInputs in;
  in.ids = {"a", "b", "c", "d", "e", "f"};
  in.features = Mat::Identity(6, 6);
  in.gold = {{"a", "Happy", Split::kTrain}, {"b", "Sad", Split::kTrain}, {"c", "", std::nullopt},
             {"d", "", std::nullopt},       {"e", "Happy", Split::kValid}, {"f", "Sad", Split::kTest}};
  in.acoustic = {{"c", "Happy"}, {"d", "Sad"}};
  in.linguistic = {{{"c", "Happy"}, {"d", "Happy"}}, {{"c", "Happy"}, {"d", "Sad"}}, {{"c", "Sad"}}};
  in.labeled_fraction = 1.0;
  return in;
}

TEST(PoolBuilder, ExplicitSplitsAndVotes) {
  const auto p = build_pool(tiny_inputs());
  EXPECT_EQ(p.classes, (std::vector<std::string>{"Happy", "Sad"}));
  EXPECT_EQ(p.labeled, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p.validation, (std::vector<std::size_t>{4}));
  EXPECT_EQ(p.test, (std::vector<std::size_t>{5}));
  // c: votes Happy, Happy, Sad -> Happy agrees with acoustic. d: 1-1 tie -> no linguistic label.
  EXPECT_EQ(p.high_conf, (std::vector<std::size_t>{2}));
  EXPECT_EQ(p.low_conf, (std::vector<std::size_t>{3}));
  EXPECT_EQ(p.pseudo[2], 0);
}

TEST(PoolBuilder, LabeledFractionHidesGold) {
  auto in = tiny_inputs();
  in.labeled_fraction = 0.5;
  in.acoustic.emplace("a", "Happy");
  in.acoustic.emplace("b", "Happy");
  const auto p = build_pool(in);
  EXPECT_EQ(p.labeled.size(), 1u);
  EXPECT_EQ(p.labeled.size() + p.high_conf.size() + p.low_conf.size(), 4u);
  in.acoustic.erase("a");
  in.acoustic.erase("b");
  EXPECT_THROW(build_pool(in), InputError);
}

TEST(PoolBuilder, SeededSplitOfOpenRows) {
  PoolInputs in;
  for (int i = 0; i < 100; ++i) {
    in.ids.push_back("u" + std::to_string(i));
    in.gold.push_back({in.ids.back(), i % 2 ? "x" : "y", std::nullopt});
    in.acoustic.emplace(in.ids.back(), "x");
  }
  in.features = Mat::Zero(100, 2);
  in.seed = 5;
  const auto a = build_pool(in);
  EXPECT_EQ(a.validation.size(), 10u);
  EXPECT_EQ(a.test.size(), 10u);
  EXPECT_EQ(a.labeled.size(), 24u);
  EXPECT_EQ(a.labeled.size() + a.high_conf.size() + a.low_conf.size(), 80u);
  EXPECT_EQ(build_pool(in).labeled, a.labeled);
  in.seed = 6;
  EXPECT_NE(build_pool(in).labeled, a.labeled);
}

TEST(PoolBuilder, Violations) {
  auto in = tiny_inputs();
  in.features = Mat::Zero(5, 2);
  EXPECT_THROW(build_pool(in), InputError);
  in = tiny_inputs();
  in.gold.push_back({"zz", "Happy", std::nullopt});
  EXPECT_THROW(build_pool(in), InputError);
  in = tiny_inputs();
  in.acoustic["c"] = "Angry";
  EXPECT_THROW(build_pool(in), InputError);
  in = tiny_inputs();
  in.gold[4].label.clear();
  EXPECT_THROW(build_pool(in), InputError);
  in = tiny_inputs();
  in.ids[1] = "a";
  EXPECT_THROW(build_pool(in), InputError);
}

}  // namespace
}  // namespace sertk::semisl
