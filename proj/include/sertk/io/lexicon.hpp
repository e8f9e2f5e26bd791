#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/io/tokenize.hpp"

namespace sertk {

inline const std::set<std::string>& default_word_classes() {
  static const std::set<std::string> classes{"Noun", "Verb", "Adj", "Adv", "Wh", "Func", "Stop"};
  return classes;
}

// word -> set of class tags drawn from a closed tag set.
struct ClassLexicon {
  std::set<std::string> declared_classes = default_word_classes();
  std::map<std::string, std::set<std::string>> entries;
  std::size_t overridden = 0;  // duplicate lines replaced by a later one

  const std::set<std::string>* find(std::string_view word) const {
    auto it = entries.find(std::string(word));
    return it == entries.end() ? nullptr : &it->second;
  }
};

struct AffectScores {
  double valence = 5.0;
  double arousal = 5.0;
  double dominance = 5.0;
};

// word -> (valence, arousal, dominance), each rated on [1, 9].
struct AffectLexicon {
  std::map<std::string, AffectScores> entries;
  std::size_t overridden = 0;

  std::optional<AffectScores> find(std::string_view word) const {
    auto it = entries.find(std::string(word));
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

template <typename Fn>
void for_each_tsv_row(std::string_view text, Fn&& fn) {
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (trim(line).empty() || trim(line).front() == '#') continue;
    fn(split(line, '\t'), "lexicon line " + std::to_string(i + 1));
  }
}

inline std::string fold_key(std::string_view w) {
  std::string out(trim(w));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

inline ClassLexicon parse_class_lexicon(std::string_view text,
                                        const std::set<std::string>& declared = default_word_classes()) {
  ClassLexicon lex;
  lex.declared_classes = declared;
  detail::for_each_tsv_row(text, [&](const auto& cells, const std::string& where) {
    require(cells.size() == 2, where + ": expected 'word<TAB>tag,tag,...'");
    std::set<std::string> tags;
    for (auto t : detail::split(cells[1], ',')) {
      const std::string tag(detail::trim(t));
      if (tag.empty()) continue;
      require(declared.count(tag) > 0, where + ": undeclared class tag '" + tag + "'");
      tags.insert(tag);
    }
    require(!tags.empty(), where + ": empty tag set");
    auto [it, inserted] = lex.entries.insert_or_assign(detail::fold_key(cells[0]), std::move(tags));
    if (!inserted) ++lex.overridden;
  });
  return lex;
}

inline AffectLexicon parse_affect_lexicon(std::string_view text) {
  AffectLexicon lex;
  detail::for_each_tsv_row(text, [&](const auto& cells, const std::string& where) {
    require(cells.size() == 4, where + ": expected 'word<TAB>V<TAB>A<TAB>D'");
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) {
      require(detail::parse_double(cells[k + 1], v[k]), where + ": non-numeric affect score");
      require(v[k] >= 1.0 && v[k] <= 9.0, where + ": affect score outside [1,9]");
    }
    auto [it, inserted] =
        lex.entries.insert_or_assign(detail::fold_key(cells[0]), AffectScores{v[0], v[1], v[2]});
    if (!inserted) ++lex.overridden;
  });
  return lex;
}

inline ClassLexicon read_class_lexicon(const std::filesystem::path& path,
                                       const std::set<std::string>& declared = default_word_classes()) {
  return parse_class_lexicon(read_file_text(path), declared);
}

inline AffectLexicon read_affect_lexicon(const std::filesystem::path& path) {
  return parse_affect_lexicon(read_file_text(path));
}

enum class LexiconKind { kClass, kAffect };

inline LexiconKind parse_lexicon_kind(std::string_view s) {
  if (s == "class") return LexiconKind::kClass;
  if (s == "affect") return LexiconKind::kAffect;
  throw InputError("unknown lexicon kind '" + std::string(s) + "' (expected class|affect)");
}

using Lexicon = std::variant<ClassLexicon, AffectLexicon>;

inline Lexicon read_lexicon(const std::filesystem::path& path, LexiconKind kind) {
  if (kind == LexiconKind::kClass) return read_class_lexicon(path);
  return read_affect_lexicon(path);
}

}  // namespace sertk
