#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"

namespace sertk::metrics {

// Square confusion matrix: counts[target][predicted].
struct ConfusionCounts {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionCounts(std::vector<std::string> cls = {})
      : classes(std::move(cls)), counts(classes.size(), std::vector<std::size_t>(classes.size(), 0)) {}

  std::size_t size() const { return classes.size(); }

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }
  std::size_t true_positives(std::size_t c) const { return counts[c][c]; }
  std::size_t support(std::size_t c) const {
    std::size_t n = 0;
    for (auto v : counts[c]) n += v;
    return n;
  }
  std::size_t predicted(std::size_t c) const {
    std::size_t n = 0;
    for (const auto& row : counts) n += row[c];
    return n;
  }
};

// Builds the confusion matrix over the union of labels, sorted.
inline ConfusionCounts confusion(const std::vector<std::string>& targets, const std::vector<std::string>& predictions) {
  require(targets.size() == predictions.size(), "confusion: length mismatch");
  std::vector<std::string> cls(targets);
  cls.insert(cls.end(), predictions.begin(), predictions.end());
  std::sort(cls.begin(), cls.end());
  cls.erase(std::unique(cls.begin(), cls.end()), cls.end());
  ConfusionCounts cm(cls);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cls.size(); ++i) index[cls[i]] = i;
  for (std::size_t i = 0; i < targets.size(); ++i) ++cm.counts[index[targets[i]]][index[predictions[i]]];
  return cm;
}

inline ConfusionCounts confusion(const std::vector<int>& targets, const std::vector<int>& predictions, int n_classes) {
  require(targets.size() == predictions.size(), "confusion: length mismatch");
  std::vector<std::string> names;
  for (int c = 0; c < n_classes; ++c) names.push_back(std::to_string(c));
  ConfusionCounts cm(names);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    require(targets[i] >= 0 && targets[i] < n_classes && predictions[i] >= 0 && predictions[i] < n_classes,
            "confusion: class index out of range");
    ++cm.counts[targets[i]][predictions[i]];
  }
  return cm;
}

// Overall accuracy: total correct / n.
inline double unweighted_accuracy(const ConfusionCounts& cm) {
  const std::size_t n = cm.total();
  require(n > 0, "unweighted_accuracy: empty confusion matrix");
  std::size_t correct = 0;
  for (std::size_t c = 0; c < cm.size(); ++c) correct += cm.true_positives(c);
  return static_cast<double>(correct) / static_cast<double>(n);
}

// sum_c (n_c / n) * (TP_c / n_c), evaluated term by term as written. It
// reduces to unweighted_accuracy for every matrix.
inline double weighted_accuracy_paper(const ConfusionCounts& cm) {
  const std::size_t n = cm.total();
  require(n > 0, "weighted_accuracy: empty confusion matrix");
  std::size_t tp = 0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    if (cm.support(c) == 0) continue;
    tp += cm.true_positives(c);  // n_c cancels
  }
  return static_cast<double>(tp) / static_cast<double>(n);
}

// Macro-average recall.
inline double balanced_accuracy(const ConfusionCounts& cm) {
  require(cm.size() > 0, "balanced_accuracy: no classes");
  double sum = 0.0;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    const std::size_t nc = cm.support(c);
    require(nc > 0, "balanced_accuracy: class '" + cm.classes[c] + "' has no samples");
    sum += static_cast<double>(cm.true_positives(c)) / static_cast<double>(nc);
  }
  return sum / static_cast<double>(cm.size());
}

enum class Averaging { kMacro, kWeighted };

struct ClassPrf {
  std::string cls;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct PrfReport {
  std::vector<ClassPrf> per_class;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// One-vs-rest precision / recall / F1. Any 0/0 ratio is reported as 0.
inline PrfReport precision_recall_f1(const ConfusionCounts& cm, Averaging averaging = Averaging::kMacro) {
  const std::size_t n = cm.total();
  require(n > 0, "precision_recall_f1: empty confusion matrix");
  PrfReport r;
  for (std::size_t c = 0; c < cm.size(); ++c) {
    ClassPrf p;
    p.cls = cm.classes[c];
    p.support = cm.support(c);
    const auto tp = static_cast<double>(cm.true_positives(c));
    const auto pred = static_cast<double>(cm.predicted(c));
    p.precision = pred > 0 ? tp / pred : 0.0;
    p.recall = p.support > 0 ? tp / static_cast<double>(p.support) : 0.0;
    p.f1 = p.precision + p.recall > 0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
    r.per_class.push_back(p);
  }
  for (const auto& p : r.per_class) {
    const double w = averaging == Averaging::kMacro ? 1.0 / static_cast<double>(cm.size())
                                                    : static_cast<double>(p.support) / static_cast<double>(n);
    r.precision += w * p.precision;
    r.recall += w * p.recall;
    r.f1 += w * p.f1;
  }
  return r;
}

}  // namespace sertk::metrics
