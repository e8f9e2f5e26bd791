#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sertk/error.hpp"

namespace sertk::semisl {

using LabelMap = std::map<std::string, std::string>;

// Strict majority per id among the voters that labeled it. Ties and
// pluralities below half leave the id without a label.
inline std::map<std::string, std::optional<std::string>> majority_vote(const std::vector<LabelMap>& voters) {
  std::map<std::string, std::map<std::string, std::size_t>> tallies;
  for (const auto& v : voters)
    for (const auto& [id, cls] : v) ++tallies[id][cls];
  std::map<std::string, std::optional<std::string>> out;
  for (const auto& [id, tally] : tallies) {
    std::size_t total = 0;
    for (const auto& [cls, c] : tally) total += c;
    std::optional<std::string> winner;
    for (const auto& [cls, c] : tally)
      if (2 * c > total) winner = cls;
    out[id] = winner;
  }
  return out;
}

struct PseudoLabelRecord {
  std::string id;
  std::string acoustic;
  std::optional<std::string> linguistic;
  std::optional<std::string> model;
};

struct Selection {
  LabelMap high;                // id -> agreed class
  std::vector<std::string> low;  // sorted ids
};

// High confidence iff the linguistic label exists and equals the acoustic one.
inline Selection select_high_confidence(const std::vector<PseudoLabelRecord>& records) {
  Selection s;
  for (const auto& r : records) {
    require(!r.acoustic.empty(), "select: record '" + r.id + "' has no acoustic label");
    if (r.linguistic && *r.linguistic == r.acoustic)
      s.high[r.id] = r.acoustic;
    else
      s.low.push_back(r.id);
  }
  std::sort(s.low.begin(), s.low.end());
  return s;
}

}  // namespace sertk::semisl
