#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"

namespace sertk::semisl {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 300;
  double l2 = 1e-4;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;

  void validate() const {
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "train: learning rate must be positive");
    require(l2 >= 0.0 && std::isfinite(l2), "train: l2 must be non-negative");
  }
};

// Multinomial logistic regression on z-scored inputs. `weights` is
// (features + 1) x classes; the last row holds the biases.
struct ClassifierModel {
  Vec feature_mean;
  Vec feature_scale;
  Mat weights;
  TrainConfig config;

  Eigen::Index n_features() const { return feature_mean.size(); }
  Eigen::Index n_classes() const { return weights.cols(); }
};

inline Mat with_bias(const Mat& x) {
  Mat xb(x.rows(), x.cols() + 1);
  xb.leftCols(x.cols()) = x;
  xb.col(x.cols()).setOnes();
  return xb;
}

// Row-wise softmax, max-shifted.
inline Mat softmax_rows(const Mat& logits) {
  Mat p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

inline Mat one_hot(std::span<const int> labels, Eigen::Index n_classes) {
  Mat y = Mat::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] < n_classes, "train: label index out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

// Mean cross-entropy plus (l2 / 2) * ||W||^2 over non-bias rows, and its
// gradient with respect to W. `xb` already carries the bias column.
inline std::pair<double, Mat> loss_and_gradient(const Mat& xb, std::span<const int> labels, const Mat& w, double l2) {
  require(xb.cols() == w.rows(), "loss: weight rows do not match features + 1");
  require(static_cast<std::size_t>(xb.rows()) == labels.size() && xb.rows() > 0, "loss: label count mismatch");
  const Mat y = one_hot(labels, w.cols());
  const Mat logits = xb * w;
  const Mat p = softmax_rows(logits);
  const auto n = static_cast<double>(xb.rows());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < xb.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    loss += lse - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  loss /= n;
  const auto body = w.topRows(w.rows() - 1);
  loss += 0.5 * l2 * body.squaredNorm();
  Mat grad = xb.transpose() * (p - y) / n;
  grad.topRows(w.rows() - 1) += l2 * body;
  return {loss, grad};
}

inline Mat standardize(const ClassifierModel& m, const Mat& x) {
  require(x.cols() == m.n_features(), "classifier: expected " + std::to_string(m.n_features()) +
                                          " features, got " + std::to_string(x.cols()));
  return (x.rowwise() - m.feature_mean.transpose()).array().rowwise() / m.feature_scale.transpose().array();
}

inline ClassifierModel train_builtin(const Mat& x, std::span<const int> labels, int n_classes,
                                     const TrainConfig& cfg = {}) {
  cfg.validate();
  require(x.rows() > 0 && static_cast<std::size_t>(x.rows()) == labels.size(), "train: label count mismatch");
  require(x.allFinite(), "train: non-finite features");
  require(n_classes >= 2, "train: need at least 2 classes");
  {
    std::vector<int> seen(labels.begin(), labels.end());
    std::sort(seen.begin(), seen.end());
    require(std::unique(seen.begin(), seen.end()) - seen.begin() >= 2, "train: training labels contain a single class");
  }
  ClassifierModel m;
  m.config = cfg;
  m.feature_mean = x.colwise().mean().transpose();
  const Mat centered = x.rowwise() - m.feature_mean.transpose();
  m.feature_scale = (centered.colwise().squaredNorm() / static_cast<double>(x.rows())).cwiseSqrt().transpose();
  for (auto& s : m.feature_scale)
    if (s <= 1e-12) s = 1.0;
  m.weights = Mat::Zero(x.cols() + 1, n_classes);

  const Mat xb = with_bias(standardize(m, x));
  const std::size_t n = labels.size();
  const std::size_t batch = cfg.batch_size == 0 || cfg.batch_size >= n ? n : cfg.batch_size;
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch == n) {
      auto [loss, grad] = loss_and_gradient(xb, labels, m.weights, cfg.l2);
      if (!std::isfinite(loss)) throw InputError("train: loss became non-finite at epoch " + std::to_string(epoch));
      m.weights -= cfg.learning_rate * grad;
      continue;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      Mat xs(static_cast<Eigen::Index>(len), xb.cols());
      std::vector<int> ys(len);
      for (std::size_t k = 0; k < len; ++k) {
        xs.row(static_cast<Eigen::Index>(k)) = xb.row(static_cast<Eigen::Index>(order[start + k]));
        ys[k] = labels[order[start + k]];
      }
      auto [loss, grad] = loss_and_gradient(xs, ys, m.weights, cfg.l2);
      if (!std::isfinite(loss)) throw InputError("train: loss became non-finite at epoch " + std::to_string(epoch));
      m.weights -= cfg.learning_rate * grad;
    }
  }
  ensure(m.weights.allFinite(), "train: non-finite weights");
  return m;
}

inline Mat predict_proba(const ClassifierModel& m, const Mat& x) {
  return softmax_rows(with_bias(standardize(m, x)) * m.weights);
}

struct Prediction {
  std::vector<int> labels;
  Mat probabilities;
};

inline std::vector<int> argmax_rows(const Mat& p) {
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    p.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

inline Prediction predict(const ClassifierModel& m, const Mat& x) {
  Prediction p;
  p.probabilities = predict_proba(m, x);
  p.labels = argmax_rows(p.probabilities);
  return p;
}

// Train / predict-proba contract so external models can stand in for the
// built-in one. A fresh instance is requested whenever a model is retrained.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const Mat& x, std::span<const int> labels, int n_classes) = 0;
  virtual Mat predict_proba(const Mat& x) const = 0;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

class LogisticClassifier final : public Classifier {
 public:
  explicit LogisticClassifier(TrainConfig cfg = {}) : cfg_(cfg) {}

  void fit(const Mat& x, std::span<const int> labels, int n_classes) override {
    model_ = train_builtin(x, labels, n_classes, cfg_);
  }
  Mat predict_proba(const Mat& x) const override {
    require(model_.weights.size() > 0, "classifier: predict before fit");
    return semisl::predict_proba(model_, x);
  }
  const ClassifierModel& model() const { return model_; }

 private:
  TrainConfig cfg_;
  ClassifierModel model_;
};

inline ClassifierFactory logistic_factory(TrainConfig cfg = {}) {
  return [cfg] { return std::make_unique<LogisticClassifier>(cfg); };
}

}  // namespace sertk::semisl
