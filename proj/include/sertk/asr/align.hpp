#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/tokenize.hpp"

namespace sertk::asr {

enum class EditOp : std::uint8_t { kMatch, kSub, kDel, kIns };

inline std::string_view to_string(EditOp op) {
  switch (op) {
    case EditOp::kMatch: return "match";
    case EditOp::kSub: return "sub";
    case EditOp::kDel: return "del";
    case EditOp::kIns: return "ins";
  }
  return "match";
}

struct AlignedPair {
  EditOp op = EditOp::kMatch;
  std::optional<std::size_t> ref_index;  // absent for insertions
  std::optional<std::size_t> hyp_index;  // absent for deletions
};

struct EditAlignment {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t matches = 0;
  std::size_t ref_length = 0;
  std::size_t hyp_length = 0;
  std::vector<AlignedPair> ops;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment. The backtrace prefers match, then
// substitution, deletion, insertion, so the op sequence is reproducible.
template <typename T>
EditAlignment align_sequences(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> d((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) d[i * w] = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) d[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u);
      d[i * w + j] = std::min({diag, d[(i - 1) * w + j] + 1u, d[i * w + j - 1] + 1u});
    }
  }

  EditAlignment a;
  a.ref_length = n;
  a.hyp_length = m;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t cur = d[i * w + j];
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[(i - 1) * w + j - 1] == cur) {
      a.ops.push_back({EditOp::kMatch, i - 1, j - 1});
      ++a.matches;
      --i, --j;
    } else if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == cur) {
      a.ops.push_back({EditOp::kSub, i - 1, j - 1});
      ++a.substitutions;
      --i, --j;
    } else if (i > 0 && d[(i - 1) * w + j] + 1 == cur) {
      a.ops.push_back({EditOp::kDel, i - 1, std::nullopt});
      ++a.deletions;
      --i;
    } else {
      ensure(j > 0 && d[i * w + j - 1] + 1 == cur, "align: inconsistent DP table");
      a.ops.push_back({EditOp::kIns, std::nullopt, j - 1});
      ++a.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

inline EditAlignment align(const Tokens& ref, const Tokens& hyp) { return align_sequences(ref, hyp); }

inline double wer(const EditAlignment& a) {
  require(a.ref_length > 0, "wer: empty reference");
  return static_cast<double>(a.errors()) / static_cast<double>(a.ref_length);
}

inline double wer(const Tokens& ref, const Tokens& hyp) { return wer(align(ref, hyp)); }

// UTF-8 code points of the tokens concatenated without spaces.
inline std::vector<std::u32string::value_type> characters_of(const Tokens& tokens) {
  std::vector<char32_t> out;
  for (const auto& t : tokens) {
    for (std::size_t i = 0; i < t.size();) {
      const auto c = static_cast<unsigned char>(t[i]);
      int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
      if (i + len > t.size()) len = 1;
      char32_t cp = len == 1 ? c : c & (0xFF >> (len + 1));
      for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(t[i + k]) & 0x3F);
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

inline EditAlignment align_characters(const Tokens& ref, const Tokens& hyp) {
  return align_sequences(characters_of(ref), characters_of(hyp));
}

// Character error rate over the whitespace-free character sequences.
inline double cer(const Tokens& ref, const Tokens& hyp) {
  const auto a = align_characters(ref, hyp);
  require(a.ref_length > 0, "cer: empty reference");
  return static_cast<double>(a.errors()) / static_cast<double>(a.ref_length);
}

}  // namespace sertk::asr
