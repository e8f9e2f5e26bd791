#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace sertk {

using Tokens = std::vector<std::string>;

// Transcript normalization shared by every text metric: lowercase, drop
// punctuation characters, split on whitespace.
struct Tokenizer {
  std::string punctuation = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

  bool is_punct(char c) const { return punctuation.find(c) != std::string::npos; }

  std::string normalize_word(std::string_view w) const {
    std::string out;
    out.reserve(w.size());
    for (char c : w) {
      if (is_punct(c)) continue;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
  }

  Tokens operator()(std::string_view text) const {
    Tokens out;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (!is_punct(c)) {
        cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    flush();
    return out;
  }
};

inline std::string join_tokens(const Tokens& tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace sertk
