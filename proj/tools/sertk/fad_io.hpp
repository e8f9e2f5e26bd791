#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "sertk/fad/score_table.hpp"
#include "sertk/io/matrix_io.hpp"

// Directory layouts consumed by `fad` and `semisl --derive-acoustic`:
//   labeled/<class>/<encoder>.emat|.csv   embeddings of one emotion class
//   unlabeled/<encoder>.emat|.csv         embeddings of the unlabeled data
namespace sertk::cli {

inline bool is_matrix_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return fs::is_regular_file(p) && (ext == ".emat" || ext == ".csv");
}

inline std::vector<fs::path> sorted_entries(const fs::path& dir) {
  require(fs::is_directory(dir), "not a directory: '" + dir.string() + "'");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// encoder name -> matrix file inside `dir`, optionally filtered to `wanted`.
inline std::map<std::string, fs::path> encoder_files(const fs::path& dir, const std::vector<std::string>& wanted) {
  std::map<std::string, fs::path> found;
  for (const auto& p : sorted_entries(dir)) {
    if (!is_matrix_file(p)) continue;
    const auto name = p.stem().string();
    require(!found.contains(name), "encoder '" + name + "' has two files in '" + dir.string() + "'");
    found.emplace(name, p);
  }
  if (wanted.empty()) {
    require(!found.empty(), "no .emat or .csv files in '" + dir.string() + "'");
    return found;
  }
  std::map<std::string, fs::path> out;
  for (const auto& e : wanted) {
    const auto it = found.find(e);
    require(it != found.end(), "encoder '" + e + "' missing from '" + dir.string() + "'");
    out.emplace(e, it->second);
  }
  return out;
}

inline fad::EncoderStats fit_encoders(const std::map<std::string, fs::path>& files, double shrinkage) {
  fad::EncoderStats out;
  for (const auto& [name, path] : files) {
    try {
      out.emplace(name, fad::fit_gaussian(read_matrix(path).values, shrinkage));
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  return out;
}

inline std::map<std::string, fad::EncoderStats> load_labeled(const fs::path& dir, const std::vector<std::string>& encoders,
                                                             double shrinkage) {
  std::map<std::string, fad::EncoderStats> out;
  for (const auto& p : sorted_entries(dir))
    if (fs::is_directory(p)) out.emplace(p.filename().string(), fit_encoders(encoder_files(p, encoders), shrinkage));
  require(!out.empty(), "no class directories in '" + dir.string() + "'");
  return out;
}

// A directory of per-encoder files, or one matrix file shared by every
// encoder of the labeled set.
inline fad::EncoderStats load_unlabeled(const fs::path& path, const std::map<std::string, fad::EncoderStats>& labeled,
                                        const std::vector<std::string>& encoders, double shrinkage) {
  if (fs::is_directory(path)) {
    std::vector<std::string> names = encoders;
    if (names.empty())
      for (const auto& [e, _] : labeled.begin()->second) names.push_back(e);
    return fit_encoders(encoder_files(path, names), shrinkage);
  }
  require(fs::is_regular_file(path), "unlabeled input not found: '" + path.string() + "'");
  const auto stats = fit_encoders({{"unlabeled", path}}, shrinkage).at("unlabeled");
  fad::EncoderStats out;
  for (const auto& [e, _] : labeled.begin()->second) out.emplace(e, stats);
  return out;
}

// Precomputed grid: header `encoder,<class>...`, one row per encoder. A row
// named "average" is ignored so `fad score` CSV output can be read back.
inline fad::FadScoreTable read_score_grid(const fs::path& path, const std::vector<std::string>& encoders,
                                          bool normalized) {
  const auto text = read_file_text(path);
  const auto lines = detail::lines_of(text);
  std::vector<std::string> classes;
  std::map<std::string, std::vector<double>> rows;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    const std::string where = path.string() + " line " + std::to_string(i + 1);
    if (classes.empty()) {
      require(cells.size() >= 2, where + ": header needs an encoder column and at least one class");
      for (std::size_t c = 1; c < cells.size(); ++c) classes.emplace_back(detail::trim(cells[c]));
      continue;
    }
    require(cells.size() == classes.size() + 1, where + ": expected " + std::to_string(classes.size() + 1) + " cells");
    const std::string name(detail::trim(cells[0]));
    if (name == "average") continue;
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      require(detail::parse_double(detail::trim(cells[c]), v), where + ": not a number");
      row.push_back(v);
    }
    require(rows.emplace(name, std::move(row)).second, where + ": duplicate encoder '" + name + "'");
    order.push_back(name);
  }
  require(!classes.empty(), path.string() + ": empty score grid");
  const std::vector<std::string>& pick = encoders.empty() ? order : encoders;
  std::vector<std::vector<double>> scores;
  for (const auto& e : pick) {
    const auto it = rows.find(e);
    require(it != rows.end(), path.string() + ": no row for encoder '" + e + "'");
    scores.push_back(it->second);
  }
  return fad::table_from_scores(pick, classes, scores, normalized);
}

}  // namespace sertk::cli
