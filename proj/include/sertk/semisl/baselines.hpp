#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/semisl/classifier.hpp"
#include "sertk/semisl/loop.hpp"
#include "sertk/semisl/pool.hpp"

namespace sertk::semisl {

enum class Baseline { kSupervisedFull, kSupervisedLimited, kDecisionMerging, kCoTraining };

inline Baseline parse_baseline(std::string_view s) {
  if (s == "supervised_full") return Baseline::kSupervisedFull;
  if (s == "supervised_limited") return Baseline::kSupervisedLimited;
  if (s == "decision_merging") return Baseline::kDecisionMerging;
  if (s == "co_training") return Baseline::kCoTraining;
  throw InputError("unknown baseline '" + std::string(s) +
                   "' (expected supervised_full|supervised_limited|decision_merging|co_training)");
}

inline std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::kSupervisedFull: return "supervised_full";
    case Baseline::kSupervisedLimited: return "supervised_limited";
    case Baseline::kDecisionMerging: return "decision_merging";
    case Baseline::kCoTraining: return "co_training";
  }
  return "supervised_full";
}

// Per-row features of the two modalities, aligned with the pool rows.
struct TwoViews {
  Mat a;
  Mat b;
};

struct BaselineConfig {
  double threshold = 0.5;
  LoopConfig loop{};  // stopping rule for co-training
};

struct BaselineReport {
  Baseline kind = Baseline::kSupervisedLimited;
  double validation_ua = 0.0;
  std::optional<double> test_ua;
  std::size_t promoted = 0;
  std::size_t iterations = 1;
};

// Averages two probability vectors and returns the argmax class when its
// merged probability reaches the threshold.
inline std::optional<int> merge_decisions(const Vec& pa, const Vec& pb, double threshold) {
  require(pa.size() == pb.size() && pa.size() > 0, "merge: probability vectors differ in length");
  const Vec merged = 0.5 * (pa + pb);
  Eigen::Index best = 0;
  const double p = merged.maxCoeff(&best);
  if (p >= threshold) return static_cast<int>(best);
  return std::nullopt;
}

namespace detail {

inline std::vector<std::size_t> unlabeled_rows(const DataPool& pool) {
  std::vector<std::size_t> rows = pool.high_conf;
  rows.insert(rows.end(), pool.low_conf.begin(), pool.low_conf.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline BaselineReport fit_and_score(Baseline kind, const DataPool& pool, const std::vector<std::size_t>& rows,
                                    const std::vector<int>& labels, const ClassifierFactory& factory) {
  check_validation_classes(pool, labels);
  auto model = factory();
  model->fit(gather_rows(pool.features, rows), labels, pool.n_classes());
  BaselineReport r;
  r.kind = kind;
  r.validation_ua = evaluate_ua(*model, pool.features, pool.validation, pool.gold);
  if (!pool.test.empty()) r.test_ua = evaluate_ua(*model, pool.features, pool.test, pool.gold);
  return r;
}

inline Mat merged_proba(const Classifier& ma, const Classifier& mb, const TwoViews& v,
                        const std::vector<std::size_t>& rows) {
  return 0.5 * (ma.predict_proba(gather_rows(v.a, rows)) + mb.predict_proba(gather_rows(v.b, rows)));
}

}  // namespace detail

inline BaselineReport run_baseline(const DataPool& pool, Baseline kind, const ClassifierFactory& factory,
                                   const BaselineConfig& cfg = {}, const TwoViews* views = nullptr) {
  pool.validate();
  require(!pool.labeled.empty(), "baseline: empty labeled set");
  require(!pool.validation.empty(), "baseline: empty validation set");
  const auto unlabeled = detail::unlabeled_rows(pool);

  if (kind == Baseline::kSupervisedLimited)
    return detail::fit_and_score(kind, pool, pool.labeled, gather(pool.gold, pool.labeled), factory);

  if (kind == Baseline::kSupervisedFull) {
    std::vector<std::size_t> rows = pool.labeled;
    rows.insert(rows.end(), unlabeled.begin(), unlabeled.end());
    const auto labels = gather(pool.gold, rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      require(labels[i] != kNoLabel, "supervised_full: row '" + pool.ids[rows[i]] + "' has no gold label");
    return detail::fit_and_score(kind, pool, rows, labels, factory);
  }

  require(views != nullptr, std::string(to_string(kind)) + ": requires two feature views");
  require(views->a.rows() == static_cast<Eigen::Index>(pool.rows()) &&
              views->b.rows() == static_cast<Eigen::Index>(pool.rows()),
          std::string(to_string(kind)) + ": view rows do not match the pool");
  const auto limited_labels = gather(pool.gold, pool.labeled);

  if (kind == Baseline::kDecisionMerging) {
    auto ma = factory();
    auto mb = factory();
    ma->fit(gather_rows(views->a, pool.labeled), limited_labels, pool.n_classes());
    mb->fit(gather_rows(views->b, pool.labeled), limited_labels, pool.n_classes());
    std::vector<std::size_t> rows = pool.labeled;
    std::vector<int> labels = limited_labels;
    std::size_t promoted = 0;
    if (!unlabeled.empty()) {
      const Mat pa = ma->predict_proba(gather_rows(views->a, unlabeled));
      const Mat pb = mb->predict_proba(gather_rows(views->b, unlabeled));
      for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (const auto c = merge_decisions(pa.row(k).transpose(), pb.row(k).transpose(), cfg.threshold)) {
          rows.push_back(unlabeled[i]);
          labels.push_back(*c);
          ++promoted;
        }
      }
    }
    auto r = detail::fit_and_score(kind, pool, rows, labels, factory);
    r.promoted = promoted;
    return r;
  }

  // Co-training: each view's confident predictions feed the other view.
  cfg.loop.validate();
  std::vector<std::size_t> rows_a = pool.labeled, rows_b = pool.labeled;
  std::vector<int> labels_a = limited_labels, labels_b = limited_labels;
  std::set<std::size_t> given_to_a, given_to_b;
  detail::check_validation_classes(pool, limited_labels);
  detail::Stopper stopper{cfg.loop.patience};
  BaselineReport best;
  best.kind = kind;
  best.validation_ua = -1.0;
  std::size_t promoted = 0;
  std::size_t it = 0;
  for (; it < cfg.loop.max_iters; ++it) {
    auto ma = factory();
    auto mb = factory();
    ma->fit(gather_rows(views->a, rows_a), labels_a, pool.n_classes());
    mb->fit(gather_rows(views->b, rows_b), labels_b, pool.n_classes());
    const double ua = accuracy_of(argmax_rows(detail::merged_proba(*ma, *mb, *views, pool.validation)),
                                  gather(pool.gold, pool.validation));
    if (ua > best.validation_ua) {
      best.validation_ua = ua;
      best.test_ua.reset();
      if (!pool.test.empty())
        best.test_ua = accuracy_of(argmax_rows(detail::merged_proba(*ma, *mb, *views, pool.test)),
                                   gather(pool.gold, pool.test));
    }
    if (stopper.update(ua, it) || it + 1 == cfg.loop.max_iters) break;
    if (unlabeled.empty()) continue;
    const Mat pa = ma->predict_proba(gather_rows(views->a, unlabeled));
    const Mat pb = mb->predict_proba(gather_rows(views->b, unlabeled));
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const auto r = unlabeled[i];
      Eigen::Index ca = 0, cb = 0;
      if (pa.row(k).maxCoeff(&ca) >= cfg.threshold && !given_to_b.contains(r)) {
        given_to_b.insert(r);
        rows_b.push_back(r);
        labels_b.push_back(static_cast<int>(ca));
        ++promoted;
      }
      if (pb.row(k).maxCoeff(&cb) >= cfg.threshold && !given_to_a.contains(r)) {
        given_to_a.insert(r);
        rows_a.push_back(r);
        labels_a.push_back(static_cast<int>(cb));
        ++promoted;
      }
    }
  }
  best.promoted = promoted;
  best.iterations = std::min(it + 1, cfg.loop.max_iters);
  return best;
}

}  // namespace sertk::semisl
