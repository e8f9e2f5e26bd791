#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/tokenize.hpp"

namespace sertk::asr {

using NgramCounts = std::map<Tokens, std::size_t>;

inline NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts out;
  if (n == 0 || tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

inline std::size_t ngram_total(std::size_t length, std::size_t n) { return length >= n ? length - n + 1 : 0; }

// sum over hypothesis n-grams of min(hyp count, max count in any reference).
inline std::size_t clipped_matches(const NgramCounts& hyp, const std::vector<NgramCounts>& refs) {
  std::size_t total = 0;
  for (const auto& [g, c] : hyp) {
    std::size_t cap = 0;
    for (const auto& r : refs) {
      auto it = r.find(g);
      if (it != r.end()) cap = std::max(cap, it->second);
    }
    total += std::min(c, cap);
  }
  return total;
}

// 1 when c > r, exp(1 - r/c) otherwise.
inline double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  require(hyp_len > 0, "brevity_penalty: empty hypothesis");
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

// Reference length closest to the hypothesis length; ties go to the shorter.
inline std::size_t effective_ref_length(std::size_t hyp_len, const std::vector<Tokens>& refs) {
  require(!refs.empty(), "bleu: no references");
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [&](std::size_t len) { return len > hyp_len ? len - hyp_len : hyp_len - len; };
    if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
  }
  return best;
}

struct BleuConfig {
  std::size_t max_n = 4;
  bool smoothing = false;  // add one to matched and total counts at every order
};

struct BleuStats {
  std::vector<std::size_t> matches;  // index n-1
  std::vector<std::size_t> totals;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  explicit BleuStats(std::size_t max_n = 4) : matches(max_n, 0), totals(max_n, 0) {}

  BleuStats& operator+=(const BleuStats& o) {
    for (std::size_t i = 0; i < matches.size(); ++i) {
      matches[i] += o.matches[i];
      totals[i] += o.totals[i];
    }
    hyp_length += o.hyp_length;
    ref_length += o.ref_length;
    return *this;
  }
};

inline BleuStats bleu_stats(const std::vector<Tokens>& references, const Tokens& hypothesis,
                            std::size_t max_n = 4) {
  require(!references.empty(), "bleu: no references");
  BleuStats s(max_n);
  s.hyp_length = hypothesis.size();
  s.ref_length = effective_ref_length(hypothesis.size(), references);
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::vector<NgramCounts> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back(count_ngrams(r, n));
    s.matches[n - 1] = clipped_matches(count_ngrams(hypothesis, n), refs);
    s.totals[n - 1] = ngram_total(hypothesis.size(), n);
  }
  return s;
}

// BP * exp(sum_n w_n log p_n) with uniform weights.
inline double bleu_from_stats(const BleuStats& s, bool smoothing = false) {
  require(s.hyp_length > 0, "bleu: empty hypothesis");
  const std::size_t max_n = s.matches.size();
  double log_sum = 0.0;
  for (std::size_t i = 0; i < max_n; ++i) {
    const double num = static_cast<double>(s.matches[i]) + (smoothing ? 1.0 : 0.0);
    const double den = static_cast<double>(s.totals[i]) + (smoothing ? 1.0 : 0.0);
    if (num == 0.0 || den == 0.0) return 0.0;
    log_sum += std::log(num / den) / static_cast<double>(max_n);
  }
  return brevity_penalty(s.hyp_length, s.ref_length) * std::exp(log_sum);
}

inline double bleu(const std::vector<Tokens>& references, const Tokens& hypothesis, const BleuConfig& cfg = {}) {
  require(!hypothesis.empty(), "bleu: empty hypothesis");
  return bleu_from_stats(bleu_stats(references, hypothesis, cfg.max_n), cfg.smoothing);
}

// Corpus-level BLEU: n-gram statistics and lengths pooled over segments.
inline double corpus_bleu(const std::vector<std::vector<Tokens>>& references, const std::vector<Tokens>& hypotheses,
                          const BleuConfig& cfg = {}) {
  require(references.size() == hypotheses.size(), "corpus_bleu: segment count mismatch");
  require(!hypotheses.empty(), "corpus_bleu: empty corpus");
  BleuStats total(cfg.max_n);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) total += bleu_stats(references[i], hypotheses[i], cfg.max_n);
  return bleu_from_stats(total, cfg.smoothing);
}

struct GleuResult {
  std::size_t matches = 0;      // clipped n-gram matches pooled over n = 1..max_n
  std::size_t hyp_ngrams = 0;
  std::size_t ref_ngrams = 0;
  double precision = 0.0;
  double recall = 0.0;
  double score = 0.0;           // min(precision, recall)
};

inline GleuResult gleu_stats(const Tokens& reference, const Tokens& hypothesis, std::size_t max_n = 4) {
  require(!reference.empty() && !hypothesis.empty(), "gleu: empty input");
  GleuResult g;
  for (std::size_t n = 1; n <= max_n; ++n) {
    g.matches += clipped_matches(count_ngrams(hypothesis, n), {count_ngrams(reference, n)});
    g.hyp_ngrams += ngram_total(hypothesis.size(), n);
    g.ref_ngrams += ngram_total(reference.size(), n);
  }
  g.precision = static_cast<double>(g.matches) / static_cast<double>(g.hyp_ngrams);
  g.recall = static_cast<double>(g.matches) / static_cast<double>(g.ref_ngrams);
  g.score = std::min(g.precision, g.recall);
  return g;
}

inline double gleu(const Tokens& reference, const Tokens& hypothesis, std::size_t max_n = 4) {
  return gleu_stats(reference, hypothesis, max_n).score;
}

}  // namespace sertk::asr
