#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/fad/gaussian.hpp"

namespace sertk::fad {

// scores[e][c] is the distance between the unlabeled data and class c under
// encoder e. Rows and columns follow `encoders` and `classes`.
struct FadScoreTable {
  std::vector<std::string> encoders;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> scores;
  std::vector<double> average;                       // unweighted mean over encoders
  std::optional<std::vector<double>> normalized_average;  // per-encoder min-max first

  double at(std::size_t encoder, std::size_t cls) const { return scores.at(encoder).at(cls); }
};

inline void finalize_averages(FadScoreTable& t, bool normalized) {
  const std::size_t nc = t.classes.size();
  const std::size_t ne = t.encoders.size();
  t.average.assign(nc, 0.0);
  for (const auto& row : t.scores)
    for (std::size_t c = 0; c < nc; ++c) t.average[c] += row[c] / static_cast<double>(ne);
  t.normalized_average.reset();
  if (!normalized) return;
  std::vector<double> avg(nc, 0.0);
  for (const auto& row : t.scores) {
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    const double span = *hi - *lo;
    for (std::size_t c = 0; c < nc; ++c)
      avg[c] += (span > 0.0 ? (row[c] - *lo) / span : 0.0) / static_cast<double>(ne);
  }
  t.normalized_average = std::move(avg);
}

// Builds a table from precomputed scores, e.g. a fixed reference grid.
inline FadScoreTable table_from_scores(std::vector<std::string> encoders, std::vector<std::string> classes,
                                       std::vector<std::vector<double>> scores, bool normalized = false) {
  require(!encoders.empty() && !classes.empty(), "fad table: no encoders or classes");
  require(scores.size() == encoders.size(), "fad table: row count does not match encoders");
  for (const auto& row : scores) {
    require(row.size() == classes.size(), "fad table: column count does not match classes");
    for (double v : row) require(std::isfinite(v) && v >= 0.0, "fad table: scores must be finite and non-negative");
  }
  FadScoreTable t{std::move(encoders), std::move(classes), std::move(scores), {}, std::nullopt};
  finalize_averages(t, normalized);
  return t;
}

using EncoderStats = std::map<std::string, GaussianStats>;

inline FadScoreTable score_table(const std::map<std::string, EncoderStats>& labeled, const EncoderStats& unlabeled,
                                 bool normalized = false) {
  require(!labeled.empty(), "fad score: no labeled classes");
  require(!unlabeled.empty(), "fad score: no encoders for the unlabeled data");
  std::vector<std::string> encoders;
  for (const auto& [name, _] : unlabeled) encoders.push_back(name);
  std::vector<std::string> classes;
  for (const auto& [cls, per_encoder] : labeled) {
    classes.push_back(cls);
    require(per_encoder.size() == unlabeled.size(), "fad score: encoder set mismatch for class '" + cls + "'");
    for (const auto& e : encoders)
      require(per_encoder.contains(e), "fad score: class '" + cls + "' lacks encoder '" + e + "'");
  }
  std::vector<std::vector<double>> scores(encoders.size(), std::vector<double>(classes.size()));
  for (std::size_t e = 0; e < encoders.size(); ++e) {
    const auto& u = unlabeled.at(encoders[e]);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const auto& l = labeled.at(classes[c]).at(encoders[e]);
      require(l.dim() == u.dim(), "fad score: dimension mismatch for encoder '" + encoders[e] + "'");
      scores[e][c] = frechet_distance(l, u);
    }
  }
  return table_from_scores(std::move(encoders), std::move(classes), std::move(scores), normalized);
}

struct PseudoLabel {
  std::string label;
  double score = 0.0;
  bool tie = false;
};

// Argmin of the average row (or the normalized one). Ties go to the
// lexicographically smallest class name and set `tie`.
inline PseudoLabel assign_pseudo_label(const FadScoreTable& t, bool use_normalized = false) {
  const auto& row = use_normalized && t.normalized_average ? *t.normalized_average : t.average;
  require(!row.empty() && row.size() == t.classes.size(), "fad label: empty table");
  PseudoLabel best{"", std::numeric_limits<double>::infinity(), false};
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (row[c] < best.score) {
      best = {t.classes[c], row[c], false};
    } else if (row[c] == best.score) {
      best.tie = true;
      best.label = std::min(best.label, t.classes[c]);
    }
  }
  return best;
}

}  // namespace sertk::fad
