#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"
#include "sertk/semisl/selection.hpp"

namespace sertk::semisl {

inline constexpr int kNoLabel = -1;

// All rows live in one feature matrix; the sets below hold row indices.
// `gold` is kNoLabel where unknown; `acoustic` / `linguistic` are the
// pseudo-label views of unlabeled rows, `pseudo` the label a high-confidence
// row trains with.
struct DataPool {
  std::vector<std::string> classes;
  std::vector<std::string> ids;
  Mat features;
  std::vector<int> gold;
  std::vector<int> acoustic;
  std::vector<int> linguistic;
  std::vector<int> pseudo;

  std::vector<std::size_t> labeled;
  std::vector<std::size_t> high_conf;
  std::vector<std::size_t> low_conf;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::vector<std::size_t> initial_high_conf;  // frozen at construction

  std::size_t rows() const { return ids.size(); }
  int n_classes() const { return static_cast<int>(classes.size()); }

  std::size_t class_index(const std::string& name) const {
    const auto it = std::find(classes.begin(), classes.end(), name);
    require(it != classes.end(), "pool: undeclared class '" + name + "'");
    return static_cast<std::size_t>(it - classes.begin());
  }

  void validate() const {
    const std::size_t n = rows();
    require(features.rows() == static_cast<Eigen::Index>(n), "pool: feature rows do not match ids");
    require(gold.size() == n && acoustic.size() == n && linguistic.size() == n && pseudo.size() == n,
            "pool: per-row label vectors have the wrong length");
    require(classes.size() >= 2, "pool: need at least 2 classes");
    std::vector<int> owner(n, -1);
    const std::vector<const std::vector<std::size_t>*> sets{&labeled, &high_conf, &low_conf, &validation, &test};
    for (std::size_t s = 0; s < sets.size(); ++s) {
      for (auto r : *sets[s]) {
        require(r < n, "pool: row index out of range");
        require(owner[r] == -1, "pool: id '" + ids[r] + "' belongs to more than one set");
        owner[r] = static_cast<int>(s);
      }
    }
    const auto in_range = [&](int c) { return c >= 0 && c < n_classes(); };
    for (auto r : labeled) require(in_range(gold[r]), "pool: labeled row '" + ids[r] + "' lacks a gold label");
    for (auto r : validation) require(in_range(gold[r]), "pool: validation row '" + ids[r] + "' lacks a gold label");
    for (auto r : high_conf) require(in_range(pseudo[r]), "pool: high-confidence row '" + ids[r] + "' lacks a class");
  }
};

// Splits unlabeled rows into high / low confidence from their two views and
// freezes the initial high-confidence set.
inline void assign_confidence(DataPool& pool, const std::vector<std::size_t>& unlabeled) {
  pool.high_conf.clear();
  pool.low_conf.clear();
  for (auto r : unlabeled) {
    require(pool.acoustic[r] != kNoLabel, "pool: row '" + pool.ids[r] + "' has no acoustic label");
    if (pool.linguistic[r] != kNoLabel && pool.linguistic[r] == pool.acoustic[r]) {
      pool.pseudo[r] = pool.acoustic[r];
      pool.high_conf.push_back(r);
    } else {
      pool.pseudo[r] = kNoLabel;
      pool.low_conf.push_back(r);
    }
  }
  pool.initial_high_conf = pool.high_conf;
}

inline Mat gather_rows(const Mat& x, const std::vector<std::size_t>& rows) {
  Mat out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

inline std::vector<int> gather(const std::vector<int>& v, const std::vector<std::size_t>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace sertk::semisl
