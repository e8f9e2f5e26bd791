#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/semisl/classifier.hpp"
#include "sertk/semisl/pool.hpp"

namespace sertk::semisl {

struct LoopConfig {
  std::size_t max_iters = 40;
  std::size_t patience = 2;
  double removal_rate = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    require(max_iters >= 1, "loop: max_iters must be at least 1");
    require(patience >= 1, "loop: patience must be at least 1");
    require(removal_rate >= 0.0 && removal_rate <= 1.0, "loop: removal_rate must lie in [0, 1]");
  }
};

struct IterationRecord {
  std::size_t iteration = 0;
  double validation_ua = 0.0;
  std::optional<double> test_ua;
  std::size_t labeled = 0;
  std::size_t high_conf = 0;  // high-confidence rows trained on this iteration
  std::size_t low_conf = 0;
  std::size_t removed = 0;    // initial high-confidence rows held out this iteration
  std::size_t promoted = 0;   // low -> high moves after evaluation
};

struct IterationHistory {
  std::vector<IterationRecord> iterations;
  std::size_t universe = 0;  // labeled + unlabeled training rows
  std::size_t best_iteration = 0;

  const IterationRecord& best() const { return iterations.at(best_iteration); }
  double initial_ua() const { return iterations.at(0).validation_ua; }
  double final_ua() const { return best().validation_ua; }
};

struct LoopResult {
  IterationHistory history;
  DataPool pool;
};

inline double accuracy_of(const std::vector<int>& predicted, const std::vector<int>& gold) {
  require(!gold.empty() && predicted.size() == gold.size(), "accuracy: empty or mismatched evaluation set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

inline double evaluate_ua(const Classifier& model, const Mat& x, const std::vector<std::size_t>& rows,
                          const std::vector<int>& gold) {
  return accuracy_of(argmax_rows(model.predict_proba(gather_rows(x, rows))), gather(gold, rows));
}

namespace detail {

inline void check_validation_classes(const DataPool& pool, const std::vector<int>& train_labels) {
  std::set<int> seen(train_labels.begin(), train_labels.end());
  for (auto r : pool.validation)
    require(seen.contains(pool.gold[r]),
            "loop: validation class '" + pool.classes[static_cast<std::size_t>(pool.gold[r])] +
                "' is absent from the training data");
}

// Strict-improvement early stopping shared by the loop and co-training.
struct Stopper {
  std::size_t patience;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_iteration = 0;
  std::size_t stall = 0;

  bool update(double score, std::size_t iteration) {
    if (score > best) {
      best = score;
      best_iteration = iteration;
      stall = 0;
    } else {
      ++stall;
    }
    return stall >= patience;
  }
};

}  // namespace detail

// Self-training over agreed pseudo-labels. Each iteration trains a fresh
// model on labeled + high-confidence rows, scores the validation set, then
// promotes low-confidence rows whose predicted label matches either view.
// A fresh fraction of the initial high-confidence rows is held out of the
// next iteration's training set; held-out rows return afterwards.
inline LoopResult run_loop(DataPool pool, const LoopConfig& cfg, const ClassifierFactory& factory) {
  cfg.validate();
  pool.validate();
  require(!pool.labeled.empty(), "loop: empty labeled set");
  require(!pool.validation.empty(), "loop: empty validation set");

  LoopResult result;
  auto& hist = result.history;
  hist.universe = pool.labeled.size() + pool.high_conf.size() + pool.low_conf.size();
  std::mt19937_64 rng(cfg.seed);
  std::set<std::size_t> held_out;
  detail::Stopper stopper{cfg.patience};

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    std::vector<std::size_t> train_rows = pool.labeled;
    std::vector<int> train_labels = gather(pool.gold, pool.labeled);
    std::size_t high_used = 0;
    for (auto r : pool.high_conf) {
      if (held_out.contains(r)) continue;
      train_rows.push_back(r);
      train_labels.push_back(pool.pseudo[r]);
      ++high_used;
    }
    detail::check_validation_classes(pool, train_labels);

    auto model = factory();
    model->fit(gather_rows(pool.features, train_rows), train_labels, pool.n_classes());

    IterationRecord rec;
    rec.iteration = it;
    rec.validation_ua = evaluate_ua(*model, pool.features, pool.validation, pool.gold);
    if (!pool.test.empty()) rec.test_ua = evaluate_ua(*model, pool.features, pool.test, pool.gold);
    rec.labeled = pool.labeled.size();
    rec.high_conf = high_used;
    rec.low_conf = pool.low_conf.size();
    rec.removed = held_out.size();
    ensure(rec.labeled + rec.high_conf + rec.low_conf + rec.removed == hist.universe,
           "loop: pool accounting does not balance");

    const bool stop = stopper.update(rec.validation_ua, it);
    if (stop || it + 1 == cfg.max_iters) {
      hist.iterations.push_back(rec);
      break;
    }

    if (!pool.low_conf.empty()) {
      const auto predicted = argmax_rows(model->predict_proba(gather_rows(pool.features, pool.low_conf)));
      std::vector<std::size_t> still_low;
      for (std::size_t i = 0; i < pool.low_conf.size(); ++i) {
        const auto r = pool.low_conf[i];
        const int label = predicted[i];
        if (label == pool.acoustic[r] || label == pool.linguistic[r]) {
          pool.pseudo[r] = label;
          pool.high_conf.push_back(r);
          ++rec.promoted;
        } else {
          still_low.push_back(r);
        }
      }
      pool.low_conf = std::move(still_low);
    }

    held_out.clear();
    const auto n_remove = static_cast<std::size_t>(
        std::llround(cfg.removal_rate * static_cast<double>(pool.initial_high_conf.size())));
    if (n_remove > 0) {
      std::vector<std::size_t> sample;
      std::sample(pool.initial_high_conf.begin(), pool.initial_high_conf.end(), std::back_inserter(sample), n_remove,
                  rng);
      held_out.insert(sample.begin(), sample.end());
    }
    hist.iterations.push_back(rec);
  }
  hist.best_iteration = stopper.best_iteration;
  result.pool = std::move(pool);
  return result;
}

inline std::string history_csv(const IterationHistory& h) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "iteration,validation_ua,test_ua,labeled,high_conf,low_conf,removed,promoted\n";
  for (const auto& r : h.iterations) {
    os << r.iteration << ',' << r.validation_ua << ',';
    if (r.test_ua) os << *r.test_ua;
    os << ',' << r.labeled << ',' << r.high_conf << ',' << r.low_conf << ',' << r.removed << ',' << r.promoted
       << '\n';
  }
  return os.str();
}

}  // namespace sertk::semisl
