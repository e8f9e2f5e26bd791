#pragma once

#include <array>
#include <functional>
#include <limits>
#include <tuple>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/asr/align.hpp"
#include "sertk/asr/ngram.hpp"
#include "sertk/error.hpp"
#include "sertk/io/lexicon.hpp"
#include "sertk/io/manifest.hpp"

namespace sertk::asr {

// One utterance of one ASR system, aligned against its reference.
struct AlignedUtterance {
  std::string id;
  Tokens reference;
  Tokens hypothesis;
  EditAlignment alignment;
  std::optional<std::string> emotion;
  std::optional<std::vector<double>> confidences;
};

struct AlignedCorpus {
  std::string system;
  std::vector<AlignedUtterance> utterances;
  std::size_t missing_hypothesis = 0;  // records without a hypothesis from this system
};

inline AlignedCorpus align_corpus(const std::vector<UtteranceRecord>& records, const std::string& system) {
  AlignedCorpus c;
  c.system = system;
  for (const auto& r : records) {
    auto it = r.hypotheses.find(system);
    if (it == r.hypotheses.end()) {
      ++c.missing_hypothesis;
      continue;
    }
    c.utterances.push_back({r.id, r.reference_tokens, it->second.tokens, align(r.reference_tokens, it->second.tokens),
                            r.emotion, it->second.confidences});
  }
  return c;
}

// Pooled WER: total edits over total reference words.
inline double pooled_wer(const std::vector<const AlignedUtterance*>& utts) {
  std::size_t edits = 0, words = 0;
  for (const auto* u : utts) {
    edits += u->alignment.errors();
    words += u->alignment.ref_length;
  }
  require(words > 0, "wer: empty reference");
  return static_cast<double>(edits) / static_cast<double>(words);
}

inline std::vector<const AlignedUtterance*> pointers(const AlignedCorpus& c) {
  std::vector<const AlignedUtterance*> out;
  for (const auto& u : c.utterances) out.push_back(&u);
  return out;
}

// --- affect bands ---------------------------------------------------------

enum class AffectBand { kLow, kMid, kHigh, kUnknown };

inline std::string_view to_string(AffectBand b) {
  switch (b) {
    case AffectBand::kLow: return "low";
    case AffectBand::kMid: return "mid";
    case AffectBand::kHigh: return "high";
    case AffectBand::kUnknown: return "unknown";
  }
  return "unknown";
}

// [1,3] -> low, (3,6] -> mid, (6,9] -> high.
inline AffectBand affect_band(double score) {
  if (score <= 3.0) return AffectBand::kLow;
  if (score <= 6.0) return AffectBand::kMid;
  return AffectBand::kHigh;
}

struct AffectBuckets {
  AffectBand valence = AffectBand::kUnknown;
  AffectBand arousal = AffectBand::kUnknown;
  AffectBand dominance = AffectBand::kUnknown;
};

inline AffectBuckets bucketize_affect(const AffectLexicon& lexicon, std::string_view word) {
  const auto s = lexicon.find(word);
  if (!s) return {};
  return {affect_band(s->valence), affect_band(s->arousal), affect_band(s->dominance)};
}

// --- word-class statistics ------------------------------------------------

inline constexpr std::string_view kUnclassified = "unclassified";
inline constexpr std::string_view kInsertionClass = "insertion";

using ClassOf = std::function<std::set<std::string>(const std::string&)>;

inline ClassOf class_of_lexicon(const ClassLexicon& lex) {
  return [&lex](const std::string& w) {
    const auto* tags = lex.find(w);
    return tags ? *tags : std::set<std::string>{};
  };
}

inline const std::set<std::string>& affect_classes() {
  static const std::set<std::string> classes{"V_low", "V_mid", "V_high", "A_low", "A_mid",
                                             "A_high", "D_low", "D_mid", "D_high"};
  return classes;
}

inline ClassOf class_of_affect(const AffectLexicon& lex) {
  return [&lex](const std::string& w) -> std::set<std::string> {
    const auto b = bucketize_affect(lex, w);
    if (b.valence == AffectBand::kUnknown) return {};
    return {"V_" + std::string(to_string(b.valence)), "A_" + std::string(to_string(b.arousal)),
            "D_" + std::string(to_string(b.dominance))};
  };
}

struct ClassStatsRow {
  std::string cls;
  std::size_t word_count = 0;   // reference tokens carrying the class
  std::size_t error_count = 0;  // sub/del errors on those tokens (insertions for the pseudo-class)
  double wr = 0.0;              // word_count / total words
  double er = 0.0;              // error_count / total errors (0 when there are no errors)
  double cr = 0.0;              // error_count / word_count (0 when the class is empty)
};

struct ClassStats {
  std::vector<ClassStatsRow> rows;  // declared classes, then unclassified, then insertion
  std::size_t total_words = 0;
  std::size_t total_errors = 0;

  const ClassStatsRow* find(std::string_view cls) const {
    for (const auto& r : rows)
      if (r.cls == cls) return &r;
    return nullptr;
  }
};

// WR / ER / CR per word class. A reference token counts once for every
// class it carries; tokens with no class go to "unclassified". Insertions
// have no reference token and are charged to the "insertion" pseudo-class.
inline ClassStats class_stats(const std::vector<const AlignedUtterance*>& corpus, const ClassOf& class_of,
                              const std::set<std::string>& declared) {
  std::map<std::string, ClassStatsRow> rows;
  for (const auto& c : declared) rows[c].cls = c;
  auto& unclassified = rows[std::string(kUnclassified)];
  unclassified.cls = kUnclassified;
  auto& insertion = rows[std::string(kInsertionClass)];
  insertion.cls = kInsertionClass;

  ClassStats out;
  for (const auto* u : corpus) {
    out.total_words += u->alignment.ref_length;
    out.total_errors += u->alignment.errors();
    std::vector<std::set<std::string>> ref_classes;
    ref_classes.reserve(u->reference.size());
    for (const auto& w : u->reference) {
      auto cls = class_of(w);
      for (const auto& c : cls)
        require(declared.count(c) > 0, "class_stats: undeclared class '" + c + "' for word '" + w + "'");
      if (cls.empty()) cls.insert(std::string(kUnclassified));
      for (const auto& c : cls) ++rows[c].word_count;
      ref_classes.push_back(std::move(cls));
    }
    for (const auto& op : u->alignment.ops) {
      if (op.op == EditOp::kSub || op.op == EditOp::kDel) {
        for (const auto& c : ref_classes[*op.ref_index]) ++rows[c].error_count;
      } else if (op.op == EditOp::kIns) {
        ++insertion.error_count;
      }
    }
  }
  auto finish = [&](ClassStatsRow r) {
    r.wr = out.total_words ? static_cast<double>(r.word_count) / out.total_words : 0.0;
    r.er = out.total_errors ? static_cast<double>(r.error_count) / out.total_errors : 0.0;
    r.cr = r.word_count ? static_cast<double>(r.error_count) / r.word_count : 0.0;
    return r;
  };
  for (const auto& c : declared) out.rows.push_back(finish(rows[c]));
  out.rows.push_back(finish(unclassified));
  out.rows.push_back(finish(insertion));
  return out;
}

// --- utterance-length bins ------------------------------------------------

struct LengthBin {
  std::string label;
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive; SIZE_MAX for the open bin
  std::size_t utterances = 0;
  std::size_t ref_words = 0;
  std::size_t errors = 0;
  double ratio = 0.0;         // share of utterances
  std::optional<double> wer;  // pooled; absent for empty bins
};

inline const std::array<std::pair<std::size_t, std::size_t>, 4>& length_bin_edges() {
  static const std::array<std::pair<std::size_t, std::size_t>, 4> edges{
      {{0, 10}, {11, 20}, {21, 30}, {31, std::numeric_limits<std::size_t>::max()}}};
  return edges;
}

inline std::size_t length_bin_index(std::size_t ref_words) {
  const auto& e = length_bin_edges();
  for (std::size_t i = 0; i < e.size(); ++i)
    if (ref_words <= e[i].second) return i;
  return e.size() - 1;
}

inline std::string length_bin_label(std::size_t index) {
  const auto [lo, hi] = length_bin_edges().at(index);
  if (hi == std::numeric_limits<std::size_t>::max()) return ">=" + std::to_string(lo);
  if (lo == 0) return "<=" + std::to_string(hi);
  return std::to_string(lo) + "-" + std::to_string(hi);
}

inline std::vector<LengthBin> length_binned_wer(const std::vector<const AlignedUtterance*>& corpus) {
  require(!corpus.empty(), "length_binned_wer: empty corpus");
  std::vector<LengthBin> bins;
  for (std::size_t i = 0; i < length_bin_edges().size(); ++i) {
    LengthBin b;
    std::tie(b.lo, b.hi) = length_bin_edges()[i];
    b.label = length_bin_label(i);
    bins.push_back(std::move(b));
  }
  for (const auto* u : corpus) {
    auto& b = bins[length_bin_index(u->alignment.ref_length)];
    ++b.utterances;
    b.ref_words += u->alignment.ref_length;
    b.errors += u->alignment.errors();
  }
  for (auto& b : bins) {
    b.ratio = static_cast<double>(b.utterances) / static_cast<double>(corpus.size());
    if (b.ref_words > 0) b.wer = static_cast<double>(b.errors) / static_cast<double>(b.ref_words);
  }
  return bins;
}

// --- per-emotion WER -----------------------------------------------------

inline constexpr std::size_t kShortUtteranceWords = 10;

struct EmotionRow {
  std::size_t utterances = 0;
  double wer = 0.0;                       // pooled, or mean of per-utterance WERs when requested
  std::optional<double> noun_ratio;       // needs a class lexicon
  double short_utterance_ratio = 0.0;     // utterances with <= 10 reference words
};

struct EmotionTable {
  std::map<std::string, EmotionRow> rows;
  std::size_t unlabeled = 0;  // utterances excluded for lacking an emotion label
};

inline EmotionTable per_emotion_wer(const std::vector<const AlignedUtterance*>& corpus,
                                    const ClassLexicon* lexicon = nullptr, bool per_utterance_mean = false) {
  EmotionTable t;
  std::map<std::string, std::vector<const AlignedUtterance*>> groups;
  for (const auto* u : corpus) {
    if (!u->emotion) {
      ++t.unlabeled;
      continue;
    }
    groups[*u->emotion].push_back(u);
  }
  for (const auto& [emo, utts] : groups) {
    EmotionRow row;
    row.utterances = utts.size();
    std::size_t nouns = 0, words = 0, short_count = 0;
    double wer_sum = 0.0;
    std::size_t wer_n = 0;
    for (const auto* u : utts) {
      words += u->reference.size();
      if (u->reference.size() <= kShortUtteranceWords) ++short_count;
      if (lexicon)
        for (const auto& w : u->reference) {
          const auto* tags = lexicon->find(w);
          if (tags && tags->count("Noun")) ++nouns;
        }
      if (u->alignment.ref_length > 0) {
        wer_sum += wer(u->alignment);
        ++wer_n;
      }
    }
    if (per_utterance_mean) {
      require(wer_n > 0, "per_emotion_wer: emotion '" + emo + "' has only empty references");
      row.wer = wer_sum / static_cast<double>(wer_n);
    } else {
      row.wer = pooled_wer(utts);
    }
    if (lexicon && words > 0) row.noun_ratio = static_cast<double>(nouns) / static_cast<double>(words);
    row.short_utterance_ratio = static_cast<double>(short_count) / static_cast<double>(utts.size());
    t.rows.emplace(emo, row);
  }
  return t;
}

// --- confidence summaries -------------------------------------------------

struct MeanAccumulator {
  std::size_t count = 0;
  double sum = 0.0;
  void add(double v) {
    ++count;
    sum += v;
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

struct ConfidenceGroup {
  MeanAccumulator all;
  MeanAccumulator correct;
  MeanAccumulator incorrect;
};

struct ConfidenceSummary {
  ConfidenceGroup overall;
  std::map<std::string, ConfidenceGroup> by_emotion;
  std::map<std::string, ConfidenceGroup> by_length_bin;
};

// Hypothesis tokens aligned as matches are correct; substituted and
// inserted tokens are incorrect. Returns nullopt when no utterance carries
// confidences for this system.
inline std::optional<ConfidenceSummary> confidence_summary(const std::vector<const AlignedUtterance*>& corpus) {
  ConfidenceSummary s;
  bool any = false;
  for (const auto* u : corpus) {
    if (!u->confidences) continue;
    any = true;
    const auto& conf = *u->confidences;
    require(conf.size() == u->hypothesis.size(), "confidence_summary: confidences not aligned to hypothesis for '" + u->id + "'");
    const auto bin_label = length_bin_label(length_bin_index(u->alignment.ref_length));
    for (const auto& op : u->alignment.ops) {
      if (!op.hyp_index) continue;
      const double c = conf[*op.hyp_index];
      require(c >= 0.0 && c <= 1.0, "confidence_summary: confidence outside [0,1] for '" + u->id + "'");
      const bool ok = op.op == EditOp::kMatch;
      std::vector<ConfidenceGroup*> groups{&s.overall, &s.by_length_bin[bin_label]};
      if (u->emotion) groups.push_back(&s.by_emotion[*u->emotion]);
      for (auto* g : groups) {
        g->all.add(c);
        (ok ? g->correct : g->incorrect).add(c);
      }
    }
  }
  if (!any) return std::nullopt;
  return s;
}

// --- whole-system report ---------------------------------------------------

struct SystemReport {
  std::string system;
  std::size_t utterances = 0;
  std::size_t missing_hypothesis = 0;
  double wer = 0.0;
  double cer = 0.0;
  double bleu = 0.0;
  double gleu = 0.0;
  std::optional<ClassStats> pos_stats;
  std::optional<ClassStats> affect_stats;
  std::vector<LengthBin> length_bins;
  EmotionTable per_emotion;
  std::optional<ConfidenceSummary> confidence;
};

struct EvalOptions {
  BleuConfig bleu;
  bool per_utterance_emotion_wer = false;
};

inline SystemReport evaluate_system(const std::vector<UtteranceRecord>& records, const std::string& system,
                                    const ClassLexicon* pos = nullptr, const AffectLexicon* affect = nullptr,
                                    const EvalOptions& opts = {}) {
  const AlignedCorpus corpus = align_corpus(records, system);
  require(!corpus.utterances.empty(), "evaluate_system: no utterances for system '" + system + "'");
  const auto utts = pointers(corpus);
  SystemReport r;
  r.system = system;
  r.utterances = utts.size();
  r.missing_hypothesis = corpus.missing_hypothesis;
  r.wer = pooled_wer(utts);

  std::size_t char_edits = 0, char_total = 0;
  std::vector<std::vector<Tokens>> refs;
  std::vector<Tokens> hyps;
  GleuResult pooled;
  for (const auto* u : utts) {
    const auto ca = align_characters(u->reference, u->hypothesis);
    char_edits += ca.errors();
    char_total += ca.ref_length;
    if (!u->hypothesis.empty()) {
      refs.push_back({u->reference});
      hyps.push_back(u->hypothesis);
    }
    for (std::size_t n = 1; n <= opts.bleu.max_n; ++n) {
      pooled.matches += clipped_matches(count_ngrams(u->hypothesis, n), {count_ngrams(u->reference, n)});
      pooled.hyp_ngrams += ngram_total(u->hypothesis.size(), n);
      pooled.ref_ngrams += ngram_total(u->reference.size(), n);
    }
  }
  require(char_total > 0, "cer: empty reference");
  r.cer = static_cast<double>(char_edits) / static_cast<double>(char_total);
  r.bleu = hyps.empty() ? 0.0 : corpus_bleu(refs, hyps, opts.bleu);
  if (pooled.hyp_ngrams > 0 && pooled.ref_ngrams > 0)
    r.gleu = std::min(static_cast<double>(pooled.matches) / pooled.hyp_ngrams,
                      static_cast<double>(pooled.matches) / pooled.ref_ngrams);
  if (pos) r.pos_stats = class_stats(utts, class_of_lexicon(*pos), pos->declared_classes);
  if (affect) r.affect_stats = class_stats(utts, class_of_affect(*affect), affect_classes());
  r.length_bins = length_binned_wer(utts);
  r.per_emotion = per_emotion_wer(utts, pos, opts.per_utterance_emotion_wer);
  r.confidence = confidence_summary(utts);
  return r;
}

}  // namespace sertk::asr
