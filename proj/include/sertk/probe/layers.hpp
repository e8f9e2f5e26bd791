#pragma once

#include <map>
#include <string>
#include <vector>

#include "sertk/dsp/aggregate.hpp"
#include "sertk/error.hpp"
#include "sertk/probe/cca.hpp"

namespace sertk::probe {

// Layer index -> similarity score; indices run 0..size-1.
struct LayerSweep {
  std::vector<double> scores;
  std::size_t layer_count() const { return scores.size(); }
};

inline LayerSweep layer_similarity_sweep(const std::vector<Mat>& layers, const Mat& features,
                                         const CcaConfig& cfg = {}) {
  require(!layers.empty(), "layer_similarity_sweep: empty layer list");
  LayerSweep out;
  out.scores.reserve(layers.size());
  for (const auto& layer : layers) out.scores.push_back(cca_similarity(layer, features, cfg));
  return out;
}

// Symmetric layer-by-layer similarity matrix.
inline Mat pairwise_layer_correlation(const std::vector<Mat>& layers, const CcaConfig& cfg = {}) {
  require(layers.size() >= 2, "pairwise_layer_correlation: need at least 2 layers");
  const auto n = static_cast<Eigen::Index>(layers.size());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double s = cca_similarity(layers[i], layers[j], cfg);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

struct HierarchicalDiff {
  double frame = 0.0;
  double phone = 0.0;
  double word = 0.0;
  double phone_minus_frame = 0.0;
  double word_minus_phone = 0.0;
};

// Similarity of one representation sequence to frame-, phone- and
// word-level features, and the level-to-level differences.
inline HierarchicalDiff hierarchical_cca_diff(const Mat& reps, const Mat& feats_frame, const Mat& feats_phone,
                                              const Mat& feats_word, const CcaConfig& cfg = {}) {
  HierarchicalDiff d;
  d.frame = cca_similarity(reps, feats_frame, cfg);
  d.phone = cca_similarity(reps, feats_phone, cfg);
  d.word = cca_similarity(reps, feats_word, cfg);
  d.phone_minus_frame = d.phone - d.frame;
  d.word_minus_phone = d.word - d.phone;
  return d;
}

inline HierarchicalDiff hierarchical_cca_diff(const Mat& reps, const Mat& feats_frame, const CcaConfig& cfg = {}) {
  return hierarchical_cca_diff(reps, feats_frame, dsp::hierarchical_aggregate(feats_frame, dsp::Level::kPhone),
                               dsp::hierarchical_aggregate(feats_frame, dsp::Level::kWord), cfg);
}

struct EmotionConditioned {
  std::map<std::string, double> scores;
  std::vector<std::string> warnings;  // classes skipped for having too few rows
};

// Per-class similarity on rows pooled within each class. Classes with fewer
// than min_rows aligned rows are left out with a warning.
inline EmotionConditioned emotion_conditioned_cca(const std::map<std::string, Mat>& reps_by_class,
                                                  const std::map<std::string, Mat>& features_by_class,
                                                  const CcaConfig& cfg = {}, Eigen::Index min_rows = 50) {
  require(!reps_by_class.empty(), "emotion_conditioned_cca: empty class map");
  EmotionConditioned out;
  for (const auto& [cls, reps] : reps_by_class) {
    auto it = features_by_class.find(cls);
    require(it != features_by_class.end(), "emotion_conditioned_cca: no features for class '" + cls + "'");
    const Eigen::Index rows = std::min(reps.rows(), it->second.rows());
    if (rows < min_rows) {
      out.warnings.push_back("class '" + cls + "' has " + std::to_string(rows) + " rows (< " +
                             std::to_string(min_rows) + "), skipped");
      continue;
    }
    out.scores[cls] = cca_similarity(reps, it->second, cfg);
  }
  return out;
}

}  // namespace sertk::probe
