#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/labels.hpp"
#include "sertk/semisl/pool.hpp"
#include "sertk/semisl/selection.hpp"

namespace sertk::semisl {

// Everything needed to lay out a DataPool from file-based inputs. Rows of
// `features` follow `ids`.
struct PoolInputs {
  std::vector<std::string> ids;
  Mat features;
  std::vector<LabelRow> gold;              // id,label[,split]; empty label = unlabeled
  LabelMap acoustic;                       // id -> acoustic pseudo-label
  std::vector<LabelMap> linguistic;        // one map per voter
  double train_fraction = 0.8;             // for rows without an explicit split
  double validation_fraction = 0.1;
  double labeled_fraction = 0.3;           // of gold-labeled training rows
  std::uint64_t seed = 0;
};

// Classes are the sorted gold labels. Rows without an explicit split are
// shuffled with `seed` and cut by the split fractions; rows lacking a gold
// label always train. Gold-labeled training rows are shuffled again and the
// first `labeled_fraction` of them keep their label visible; the rest join
// the unlabeled rows, whose confidence comes from the two pseudo-label views.
inline DataPool build_pool(const PoolInputs& in) {
  const std::size_t n = in.ids.size();
  require(n > 0, "pool: no ids");
  require(in.features.rows() == static_cast<Eigen::Index>(n), "pool: feature rows (" +
                                                                  std::to_string(in.features.rows()) +
                                                                  ") do not match ids (" + std::to_string(n) + ")");
  require(in.train_fraction >= 0.0 && in.validation_fraction >= 0.0 &&
              in.train_fraction + in.validation_fraction <= 1.0,
          "pool: split fractions must be non-negative and sum to at most 1");
  require(in.labeled_fraction >= 0.0 && in.labeled_fraction <= 1.0, "pool: labeled fraction must lie in [0, 1]");

  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < n; ++i)
    require(row_of.emplace(in.ids[i], i).second, "pool: duplicate id '" + in.ids[i] + "'");

  DataPool p;
  std::set<std::string> classes;
  for (const auto& g : in.gold)
    if (!g.label.empty()) classes.insert(g.label);
  p.classes.assign(classes.begin(), classes.end());
  require(p.classes.size() >= 2, "pool: gold labels name fewer than 2 classes");

  p.ids = in.ids;
  p.features = in.features;
  p.gold.assign(n, kNoLabel);
  p.acoustic.assign(n, kNoLabel);
  p.linguistic.assign(n, kNoLabel);
  p.pseudo.assign(n, kNoLabel);

  std::vector<std::optional<Split>> split(n);
  for (const auto& g : in.gold) {
    const auto it = row_of.find(g.id);
    require(it != row_of.end(), "pool: gold id '" + g.id + "' is not in the id list");
    if (!g.label.empty()) p.gold[it->second] = static_cast<int>(p.class_index(g.label));
    split[it->second] = g.split;
  }

  std::mt19937_64 rng(in.seed);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < n; ++i) {
    if (split[i]) continue;
    if (p.gold[i] == kNoLabel)
      split[i] = Split::kTrain;
    else
      open.push_back(i);
  }
  std::shuffle(open.begin(), open.end(), rng);
  const auto count = [&](double f) { return static_cast<std::size_t>(std::llround(f * static_cast<double>(open.size()))); };
  const std::size_t n_train = count(in.train_fraction);
  const std::size_t n_valid = std::min(count(in.validation_fraction), open.size() - n_train);
  for (std::size_t k = 0; k < open.size(); ++k)
    split[open[k]] = k < n_train ? Split::kTrain : k < n_train + n_valid ? Split::kValid : Split::kTest;

  std::vector<std::size_t> train_gold, unlabeled;
  for (std::size_t i = 0; i < n; ++i) {
    switch (*split[i]) {
      case Split::kTrain:
        (p.gold[i] == kNoLabel ? unlabeled : train_gold).push_back(i);
        break;
      case Split::kValid:
        require(p.gold[i] != kNoLabel, "pool: validation id '" + in.ids[i] + "' has no gold label");
        p.validation.push_back(i);
        break;
      case Split::kTest:
        if (p.gold[i] != kNoLabel) p.test.push_back(i);
        break;
    }
  }
  std::shuffle(train_gold.begin(), train_gold.end(), rng);
  const auto n_labeled =
      static_cast<std::size_t>(std::llround(in.labeled_fraction * static_cast<double>(train_gold.size())));
  for (std::size_t k = 0; k < train_gold.size(); ++k)
    (k < n_labeled ? p.labeled : unlabeled).push_back(train_gold[k]);
  std::sort(p.labeled.begin(), p.labeled.end());
  std::sort(unlabeled.begin(), unlabeled.end());

  const auto votes = majority_vote(in.linguistic);
  for (auto r : unlabeled) {
    const auto& id = in.ids[r];
    const auto a = in.acoustic.find(id);
    require(a != in.acoustic.end(), "pool: unlabeled id '" + id + "' has no acoustic label");
    p.acoustic[r] = static_cast<int>(p.class_index(a->second));
    const auto v = votes.find(id);
    if (v != votes.end() && v->second) p.linguistic[r] = static_cast<int>(p.class_index(*v->second));
  }
  assign_confidence(p, unlabeled);
  p.validate();
  return p;
}

}  // namespace sertk::semisl
