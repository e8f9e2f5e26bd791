#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"
#include "sertk/io/manifest.hpp"
#include "sertk/io/matrix_io.hpp"

namespace sertk {

// One row of a label CSV: `id,label` or `id,label,split`. The label may be
// empty (unlabeled training rows); a header starting with `id,` is skipped.
struct LabelRow {
  std::string id;
  std::string label;
  std::optional<Split> split;
};

namespace detail {

template <typename Fn>
void for_each_csv_row(std::string_view text, std::string_view what, Fn&& fn) {
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (i == 0 && line.starts_with("id,")) continue;
    std::vector<std::string> cells;
    for (auto c : split(line, ',')) cells.emplace_back(trim(c));
    fn(cells, std::string(what) + " line " + std::to_string(i + 1));
  }
}

}  // namespace detail

inline std::vector<LabelRow> parse_label_csv(std::string_view text) {
  std::vector<LabelRow> out;
  std::set<std::string> seen;
  detail::for_each_csv_row(text, "labels", [&](const std::vector<std::string>& cells, const std::string& where) {
    require(cells.size() == 2 || cells.size() == 3, where + ": expected id,label[,split]");
    require(!cells[0].empty(), where + ": empty id");
    require(seen.insert(cells[0]).second, where + ": duplicate id '" + cells[0] + "'");
    LabelRow r{cells[0], cells[1], std::nullopt};
    if (cells.size() == 3 && !cells[2].empty()) r.split = parse_split(cells[2]);
    out.push_back(std::move(r));
  });
  return out;
}

inline std::vector<LabelRow> read_label_csv(const std::filesystem::path& path) {
  try {
    return parse_label_csv(read_file_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// id -> label, dropping rows whose label is empty.
inline std::map<std::string, std::string> label_map(const std::vector<LabelRow>& rows) {
  std::map<std::string, std::string> out;
  for (const auto& r : rows)
    if (!r.label.empty()) out.emplace(r.id, r.label);
  return out;
}

// One row of a prediction CSV: `id,pred,target`.
struct PredictionRow {
  std::string id;
  std::string pred;
  std::string target;
};

inline std::vector<PredictionRow> parse_prediction_csv(std::string_view text) {
  std::vector<PredictionRow> out;
  detail::for_each_csv_row(text, "predictions", [&](const std::vector<std::string>& cells, const std::string& where) {
    require(cells.size() == 3, where + ": expected id,pred,target");
    require(!cells[1].empty() && !cells[2].empty(), where + ": empty prediction or target");
    out.push_back({cells[0], cells[1], cells[2]});
  });
  require(!out.empty(), "predictions: no rows");
  return out;
}

// One id per line; blank lines and '#' comments are skipped.
inline std::vector<std::string> parse_id_list(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto id = detail::trim(lines[i]);
    if (id.empty() || id.front() == '#') continue;
    require(seen.emplace(id).second, "ids line " + std::to_string(i + 1) + ": duplicate id '" + std::string(id) + "'");
    out.emplace_back(id);
  }
  return out;
}

inline std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  return parse_id_list(read_file_text(path));
}

}  // namespace sertk
