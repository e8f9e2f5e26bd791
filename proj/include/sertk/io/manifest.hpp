#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/io/tokenize.hpp"

namespace sertk {

enum class Split { kTrain, kValid, kTest };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw InputError("unknown split '" + std::string(s) + "' (expected train|valid|test)");
}

struct Hypothesis {
  std::string text;  // raw form as it appeared in the manifest
  Tokens tokens;
  std::optional<std::vector<double>> confidences;
};

// One manifest row: a reference transcript plus one hypothesis per ASR system.
struct UtteranceRecord {
  std::string id;
  std::optional<std::string> audio_path;
  std::string reference_text;
  Tokens reference_tokens;
  std::map<std::string, Hypothesis> hypotheses;
  std::optional<std::string> emotion;
  std::optional<Split> split;
};

namespace detail {

inline std::pair<std::string, Tokens> text_field(const nlohmann::json& v, const Tokenizer& tok,
                                                 const std::string& where) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    return {s, tok(s)};
  }
  if (v.is_array()) {
    Tokens raw;
    for (const auto& t : v) {
      require(t.is_string(), where + ": token lists must hold strings");
      raw.push_back(t.get<std::string>());
    }
    const auto joined = join_tokens(raw);
    return {joined, tok(joined)};
  }
  throw InputError(where + ": expected a string or a list of tokens");
}

}  // namespace detail

// Parses one JSONL manifest. Keys: id, ref, hyps{system -> string|tokens},
// optional audio, emotion, split, conf{system -> [0..1] per hypothesis token}.
inline std::vector<UtteranceRecord> parse_manifest(std::string_view text,
                                                   const Tokenizer& tok = {}) {
  std::vector<UtteranceRecord> out;
  std::set<std::string> seen;
  const auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const std::string where = "manifest line " + std::to_string(i + 1);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + ": " + e.what());
    }
    require(obj.is_object(), where + ": expected a JSON object");
    static const std::set<std::string> known{"id", "audio", "ref", "hyps", "emotion", "split", "conf"};
    for (const auto& [k, v] : obj.items())
      require(known.count(k) > 0, where + ": unknown key '" + k + "'");
    require(obj.contains("id") && obj["id"].is_string(), where + ": missing string 'id'");
    require(obj.contains("ref"), where + ": missing 'ref'");

    UtteranceRecord rec;
    rec.id = obj["id"].get<std::string>();
    require(seen.insert(rec.id).second, where + ": duplicate id '" + rec.id + "'");
    std::tie(rec.reference_text, rec.reference_tokens) = detail::text_field(obj["ref"], tok, where);
    if (obj.contains("audio")) rec.audio_path = obj["audio"].get<std::string>();
    if (obj.contains("emotion") && !obj["emotion"].is_null())
      rec.emotion = obj["emotion"].get<std::string>();
    if (obj.contains("split")) rec.split = parse_split(obj["split"].get<std::string>());
    if (obj.contains("hyps")) {
      require(obj["hyps"].is_object(), where + ": 'hyps' must be an object");
      for (const auto& [sys, v] : obj["hyps"].items()) {
        Hypothesis h;
        std::tie(h.text, h.tokens) = detail::text_field(v, tok, where + " hyps." + sys);
        rec.hypotheses.emplace(sys, std::move(h));
      }
    }
    if (obj.contains("conf")) {
      require(obj["conf"].is_object(), where + ": 'conf' must be an object");
      for (const auto& [sys, v] : obj["conf"].items()) {
        auto it = rec.hypotheses.find(sys);
        require(it != rec.hypotheses.end(), where + ": confidences for unknown system '" + sys + "'");
        require(v.is_array(), where + ": conf." + sys + " must be a list");
        std::vector<double> conf;
        for (const auto& c : v) {
          require(c.is_number(), where + ": conf." + sys + " must hold numbers");
          const double x = c.get<double>();
          require(x >= 0.0 && x <= 1.0, where + ": confidence outside [0,1] for system '" + sys + "'");
          conf.push_back(x);
        }
        require(conf.size() == it->second.tokens.size(),
                where + ": confidence/hypothesis length mismatch for system '" + sys + "' (" +
                    std::to_string(conf.size()) + " vs " + std::to_string(it->second.tokens.size()) + ")");
        it->second.confidences = std::move(conf);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<UtteranceRecord> read_manifest(const std::filesystem::path& path,
                                                  const Tokenizer& tok = {}) {
  return parse_manifest(read_file_text(path), tok);
}

inline std::set<std::string> systems_of(const std::vector<UtteranceRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records)
    for (const auto& [sys, h] : r.hypotheses) out.insert(sys);
  return out;
}

}  // namespace sertk
