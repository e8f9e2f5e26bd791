#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"

namespace sertk::probe {

enum class Reduction { kMean, kTop1 };

inline Reduction parse_reduction(std::string_view s) {
  if (s == "mean") return Reduction::kMean;
  if (s == "top1") return Reduction::kTop1;
  throw InputError("unknown CCA reduction '" + std::string(s) + "' (expected mean|top1)");
}

struct CcaConfig {
  // Covariance eigenvalues are floored at reg * (largest eigenvalue), which
  // acts as a ridge on near-singular directions only.
  double reg = 1e-12;
  Reduction reduction = Reduction::kMean;
};

struct CcaResult {
  std::vector<double> correlations;  // descending, each in [0, 1]
  std::size_t k = 0;
  double mean_corr = 0.0;
  double top_corr = 0.0;
  bool underdetermined = false;  // n <= max(p, q): correlations are inflated

  double score(Reduction r) const { return r == Reduction::kMean ? mean_corr : top_corr; }
};

inline Mat center_columns(const Mat& x) { return x.rowwise() - x.colwise().mean(); }

// Whitened basis of a centered data matrix: U * diag(s / max(s, floor)) from
// its thin SVD, with the covariance-eigenvalue floor of CcaConfig expressed
// on singular values (sqrt(reg) * s_max). Working on the data rather than
// its covariance keeps ill-conditioned but full-rank inputs accurate.
// Returns nullopt for an all-zero matrix.
inline std::optional<Mat> whitened_basis(const Mat& centered, double reg) {
  Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  if (!(top > 0.0)) return std::nullopt;
  const double rank_tol = std::numeric_limits<double>::epsilon() *
                          static_cast<double>(std::max(centered.rows(), centered.cols())) * top;
  const double floor = std::sqrt(reg) * top;
  Vec scale(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (reg == 0.0 && s(i) <= rank_tol) throw InputError("cca: zero-variance direction with reg = 0");
    scale(i) = s(i) > rank_tol ? s(i) / std::max(s(i), floor) : 0.0;
  }
  return svd.matrixU() * scale.asDiagonal();
}

// Canonical correlations between the column spaces of x (n x p) and
// y (n x q): singular values of Sxx^-1/2 Sxy Syy^-1/2, computed as those of
// Ux^T Uy for the whitened bases of the centered data.
inline CcaResult cca(const Mat& x, const Mat& y, const CcaConfig& cfg = {}) {
  require(x.rows() == y.rows(), "cca: row counts differ (" + std::to_string(x.rows()) + " vs " +
                                    std::to_string(y.rows()) + ")");
  require(x.rows() >= 2, "cca: need at least 2 rows");
  require(x.cols() >= 1 && y.cols() >= 1, "cca: empty feature set");
  require(x.allFinite() && y.allFinite(), "cca: non-finite input");
  require(cfg.reg >= 0.0, "cca: reg must be non-negative");

  CcaResult out;
  out.k = static_cast<std::size_t>(std::min(x.cols(), y.cols()));
  out.underdetermined = x.rows() <= std::max(x.cols(), y.cols());
  const auto ux = whitened_basis(center_columns(x), cfg.reg);
  const auto uy = whitened_basis(center_columns(y), cfg.reg);
  if (!ux || !uy) {
    if (cfg.reg == 0.0) throw InputError("cca: zero-variance column with reg = 0");
    out.correlations.assign(out.k, 0.0);
    return out;
  }
  const Mat t = ux->transpose() * (*uy);
  Eigen::BDCSVD<Mat> svd(t);
  const Vec& s = svd.singularValues();
  out.correlations.assign(out.k, 0.0);
  for (std::size_t i = 0; i < out.k && static_cast<Eigen::Index>(i) < s.size(); ++i)
    out.correlations[i] = std::clamp(s(static_cast<Eigen::Index>(i)), 0.0, 1.0);
  std::sort(out.correlations.begin(), out.correlations.end(), std::greater<>());
  out.mean_corr = std::accumulate(out.correlations.begin(), out.correlations.end(), 0.0) / static_cast<double>(out.k);
  out.top_corr = out.correlations.front();
  return out;
}

// Averages contiguous bins of rows down to target_len rows. The first
// (rows mod target_len) bins hold one extra row.
inline Mat downsample_rows(const Mat& x, Eigen::Index target_len) {
  require(target_len >= 1, "downsample_rows: target length must be >= 1");
  require(target_len <= x.rows(), "downsample_rows: target length exceeds row count (upsampling unsupported)");
  if (target_len == x.rows()) return x;
  const Eigen::Index base = x.rows() / target_len;
  const Eigen::Index extra = x.rows() % target_len;
  Mat out(target_len, x.cols());
  Eigen::Index start = 0;
  for (Eigen::Index b = 0; b < target_len; ++b) {
    const Eigen::Index len = base + (b < extra ? 1 : 0);
    out.row(b) = x.middleRows(start, len).colwise().mean();
    start += len;
  }
  return out;
}

// Brings two sequences to a common length by downsampling the longer one.
inline std::pair<Mat, Mat> align_rows(const Mat& a, const Mat& b) {
  if (a.rows() == b.rows()) return {a, b};
  if (a.rows() > b.rows()) return {downsample_rows(a, b.rows()), b};
  return {a, downsample_rows(b, a.rows())};
}

inline double cca_similarity(const Mat& a, const Mat& b, const CcaConfig& cfg = {}) {
  const auto [x, y] = align_rows(a, b);
  return cca(x, y, cfg).score(cfg.reduction);
}

}  // namespace sertk::probe
