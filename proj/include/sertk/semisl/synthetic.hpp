#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/semisl/baselines.hpp"
#include "sertk/semisl/pool.hpp"

namespace sertk::semisl {

struct BlobConfig {
  std::size_t n = 1000;
  std::size_t dim = 64;
  int n_classes = 4;
  double separation = 1.0;  // stddev of the class centres; points have unit noise
  double train_fraction = 0.8;
  double validation_fraction = 0.1;
  double labeled_fraction = 0.3;  // of the training rows
  double acoustic_noise = 0.1;
  double linguistic_noise = 0.2;
  std::uint64_t seed = 0;
};

struct SyntheticTask {
  DataPool pool;
  std::size_t view_split = 0;  // columns [0, view_split) form view A
};

// Gaussian blobs split into labeled / unlabeled / validation / test rows.
// Unlabeled rows get two independently corrupted copies of their gold label;
// a corrupted label is drawn uniformly from the other classes.
inline SyntheticTask make_blob_task(const BlobConfig& cfg) {
  require(cfg.n_classes >= 2 && cfg.dim >= 2 && cfg.n >= 10, "blobs: degenerate configuration");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick_other(1, cfg.n_classes - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto k = static_cast<std::size_t>(cfg.n_classes);
  Mat centres(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(cfg.dim));
  for (Eigen::Index c = 0; c < centres.rows(); ++c)
    for (Eigen::Index d = 0; d < centres.cols(); ++d) centres(c, d) = cfg.separation * normal(rng);

  SyntheticTask task;
  auto& p = task.pool;
  for (int c = 0; c < cfg.n_classes; ++c) p.classes.push_back("c" + std::to_string(c));
  p.features.resize(static_cast<Eigen::Index>(cfg.n), static_cast<Eigen::Index>(cfg.dim));
  p.gold.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int c = static_cast<int>(i % k);
    p.gold[i] = c;
    p.ids.push_back("u" + std::to_string(i));
    for (Eigen::Index d = 0; d < p.features.cols(); ++d)
      p.features(static_cast<Eigen::Index>(i), d) = centres(c, d) + normal(rng);
  }
  p.acoustic.assign(cfg.n, kNoLabel);
  p.linguistic.assign(cfg.n, kNoLabel);
  p.pseudo.assign(cfg.n, kNoLabel);

  std::vector<std::size_t> order(cfg.n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(cfg.n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(cfg.n)));
  const auto n_labeled =
      static_cast<std::size_t>(std::llround(cfg.labeled_fraction * static_cast<double>(n_train)));
  require(n_train + n_valid <= cfg.n && n_labeled <= n_train, "blobs: split fractions exceed the data");

  std::vector<std::size_t> unlabeled;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto r = order[i];
    if (i < n_labeled)
      p.labeled.push_back(r);
    else if (i < n_train)
      unlabeled.push_back(r);
    else if (i < n_train + n_valid)
      p.validation.push_back(r);
    else
      p.test.push_back(r);
  }
  const auto corrupt = [&](int gold, double rate) {
    if (unit(rng) >= rate) return gold;
    return (gold + pick_other(rng)) % cfg.n_classes;
  };
  for (auto r : unlabeled) {
    p.acoustic[r] = corrupt(p.gold[r], cfg.acoustic_noise);
    p.linguistic[r] = corrupt(p.gold[r], cfg.linguistic_noise);
  }
  assign_confidence(p, unlabeled);
  task.view_split = cfg.dim / 2;
  return task;
}

// Column halves of the pool features as the two modality views.
inline TwoViews split_views(const SyntheticTask& task) {
  const auto& x = task.pool.features;
  const auto a = static_cast<Eigen::Index>(task.view_split);
  return {x.leftCols(a), x.rightCols(x.cols() - a)};
}

}  // namespace sertk::semisl
