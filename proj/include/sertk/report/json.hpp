#pragma once

#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sertk/asr/analytics.hpp"
#include "sertk/dsp/features.hpp"
#include "sertk/fad/score_table.hpp"
#include "sertk/metrics/classification.hpp"
#include "sertk/probe/cca.hpp"
#include "sertk/probe/layers.hpp"
#include "sertk/semisl/baselines.hpp"
#include "sertk/semisl/loop.hpp"

// JSON and CSV renderings of the module results. nlohmann::json keeps object
// keys sorted, so every document has a stable key order.
namespace sertk::report {

using nlohmann::json;

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// --- dsp -------------------------------------------------------------------

inline json to_json(const dsp::FeatureMatrix& f) {
  return {{"frames", f.frames.values.rows()},
          {"columns", f.frames.column_names},
          {"jitter_local", optional_json(f.jitter_local)},
          {"shimmer_local", optional_json(f.shimmer_local)},
          {"voiced_frames", f.voiced_frames},
          {"formant_unstable_frames", f.formant_unstable_frames},
          {"formant_incomplete_frames", f.formant_incomplete_frames},
          {"unavailable", f.unavailable}};
}

// --- probe -----------------------------------------------------------------

inline json to_json(const probe::CcaResult& r) {
  return {{"correlations", r.correlations},
          {"mean_corr", r.mean_corr},
          {"top_corr", r.top_corr},
          {"underdetermined", r.underdetermined}};
}

inline json to_json(const probe::HierarchicalDiff& d) {
  return {{"frame", d.frame},
          {"phone", d.phone},
          {"word", d.word},
          {"phone_minus_frame", d.phone_minus_frame},
          {"word_minus_phone", d.word_minus_phone}};
}

inline json to_json(const probe::EmotionConditioned& e) {
  return {{"scores", e.scores}, {"warnings", e.warnings}};
}

// --- asr -------------------------------------------------------------------

inline json to_json(const asr::ClassStats& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"class", r.cls},
                    {"word_count", r.word_count},
                    {"error_count", r.error_count},
                    {"wr", r.wr},
                    {"er", r.er},
                    {"cr", r.cr}});
  return {{"rows", rows}, {"total_words", s.total_words}, {"total_errors", s.total_errors}};
}

inline json to_json(const asr::ConfidenceGroup& g) {
  return {{"all", optional_json(g.all.mean())},
          {"correct", optional_json(g.correct.mean())},
          {"incorrect", optional_json(g.incorrect.mean())},
          {"tokens", g.all.count}};
}

inline json to_json(const asr::ConfidenceSummary& s) {
  json by_emotion = json::object(), by_bin = json::object();
  for (const auto& [k, g] : s.by_emotion) by_emotion[k] = to_json(g);
  for (const auto& [k, g] : s.by_length_bin) by_bin[k] = to_json(g);
  return {{"overall", to_json(s.overall)}, {"by_emotion", by_emotion}, {"by_length_bin", by_bin}};
}

inline json to_json(const asr::SystemReport& r) {
  json bins = json::array();
  for (const auto& b : r.length_bins)
    bins.push_back({{"label", b.label},
                    {"utterances", b.utterances},
                    {"ref_words", b.ref_words},
                    {"errors", b.errors},
                    {"ratio", b.ratio},
                    {"wer", optional_json(b.wer)}});
  json emotions = json::object();
  for (const auto& [k, e] : r.per_emotion.rows)
    emotions[k] = {{"utterances", e.utterances},
                   {"wer", e.wer},
                   {"noun_ratio", optional_json(e.noun_ratio)},
                   {"short_utterance_ratio", e.short_utterance_ratio}};
  json class_stats = json::object();
  if (r.pos_stats) class_stats["pos"] = to_json(*r.pos_stats);
  if (r.affect_stats) class_stats["affect"] = to_json(*r.affect_stats);
  return {{"system", r.system},
          {"utterances", r.utterances},
          {"missing_hypothesis", r.missing_hypothesis},
          {"wer", r.wer},
          {"cer", r.cer},
          {"bleu", r.bleu},
          {"gleu", r.gleu},
          {"class_stats", class_stats},
          {"length_bins", bins},
          {"per_emotion", {{"rows", emotions}, {"unlabeled", r.per_emotion.unlabeled}}},
          {"confidence_summary", r.confidence ? to_json(*r.confidence) : json(nullptr)}};
}

namespace detail {

inline std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

template <typename T>
void put_optional(std::ostream& os, const std::optional<T>& v) {
  if (v) os << *v;
}

}  // namespace detail

// Word-class table: one row per class with WR / ER / CR.
inline std::string class_stats_csv(const asr::ClassStats& s) {
  auto os = detail::csv_stream();
  os << "class,word_count,error_count,wr,er,cr\n";
  for (const auto& r : s.rows)
    os << r.cls << ',' << r.word_count << ',' << r.error_count << ',' << r.wr << ',' << r.er << ',' << r.cr << '\n';
  return os.str();
}

inline std::string length_bins_csv(const asr::SystemReport& r) {
  auto os = detail::csv_stream();
  os << "bin,utterances,ref_words,errors,ratio,wer\n";
  for (const auto& b : r.length_bins) {
    os << b.label << ',' << b.utterances << ',' << b.ref_words << ',' << b.errors << ',' << b.ratio << ',';
    detail::put_optional(os, b.wer);
    os << '\n';
  }
  return os.str();
}

inline std::string per_emotion_csv(const asr::SystemReport& r) {
  auto os = detail::csv_stream();
  os << "emotion,utterances,wer,noun_ratio,short_utterance_ratio\n";
  for (const auto& [k, e] : r.per_emotion.rows) {
    os << k << ',' << e.utterances << ',' << e.wer << ',';
    detail::put_optional(os, e.noun_ratio);
    os << ',' << e.short_utterance_ratio << '\n';
  }
  return os.str();
}

// --- fad -------------------------------------------------------------------

inline json to_json(const fad::FadScoreTable& t) {
  json table = json::object();
  for (std::size_t e = 0; e < t.encoders.size(); ++e) {
    json row = json::object();
    for (std::size_t c = 0; c < t.classes.size(); ++c) row[t.classes[c]] = t.at(e, c);
    table[t.encoders[e]] = row;
  }
  json averages = json::object();
  for (std::size_t c = 0; c < t.classes.size(); ++c) averages[t.classes[c]] = t.average[c];
  json out{{"encoders", t.encoders}, {"classes", t.classes}, {"table", table}, {"averages", averages}};
  if (t.normalized_average) {
    json norm = json::object();
    for (std::size_t c = 0; c < t.classes.size(); ++c) norm[t.classes[c]] = (*t.normalized_average)[c];
    out["normalized_averages"] = norm;
  }
  return out;
}

// Encoders as rows, classes as columns, and a closing "average" row.
inline std::string fad_table_csv(const fad::FadScoreTable& t) {
  auto os = detail::csv_stream();
  os << "encoder";
  for (const auto& c : t.classes) os << ',' << c;
  os << '\n';
  for (std::size_t e = 0; e < t.encoders.size(); ++e) {
    os << t.encoders[e];
    for (std::size_t c = 0; c < t.classes.size(); ++c) os << ',' << t.at(e, c);
    os << '\n';
  }
  os << "average";
  for (double v : t.average) os << ',' << v;
  os << '\n';
  return os.str();
}

// --- metrics ---------------------------------------------------------------

inline json to_json(const metrics::ConfusionCounts& cm) {
  return {{"classes", cm.classes}, {"counts", cm.counts}};
}

inline json to_json(const metrics::PrfReport& r) {
  json per_class = json::object();
  for (const auto& p : r.per_class)
    per_class[p.cls] = {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
  return {{"per_class", per_class}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

// --- semisl ----------------------------------------------------------------

inline json to_json(const semisl::IterationRecord& r) {
  return {{"iteration", r.iteration},
          {"validation_ua", r.validation_ua},
          {"test_ua", optional_json(r.test_ua)},
          {"labeled", r.labeled},
          {"high_conf", r.high_conf},
          {"low_conf", r.low_conf},
          {"removed", r.removed},
          {"promoted", r.promoted}};
}

inline json to_json(const semisl::IterationHistory& h) {
  return {{"iterations", h.iterations.size()},
          {"universe", h.universe},
          {"best_iteration", h.best_iteration},
          {"initial_validation_ua", h.initial_ua()},
          {"final_validation_ua", h.final_ua()},
          {"best", to_json(h.best())},
          {"last", to_json(h.iterations.back())}};
}

inline json to_json(const semisl::BaselineReport& r) {
  return {{"baseline", std::string(semisl::to_string(r.kind))},
          {"validation_ua", r.validation_ua},
          {"test_ua", optional_json(r.test_ua)},
          {"promoted", r.promoted},
          {"iterations", r.iterations}};
}

}  // namespace sertk::report
