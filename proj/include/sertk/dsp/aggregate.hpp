#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"

namespace sertk::dsp {

enum class Level { kFrame, kPhone, kWord };

inline Level parse_level(std::string_view s) {
  if (s == "frame") return Level::kFrame;
  if (s == "phone") return Level::kPhone;
  if (s == "word") return Level::kWord;
  throw InputError("unknown level '" + std::string(s) + "' (expected frame|phone|word)");
}

inline constexpr Eigen::Index kUnitsPerLevel = 5;

// Averages non-overlapping groups of `group` rows; the final partial group
// is averaged over its actual size.
inline Mat average_groups(const Mat& x, Eigen::Index group) {
  require(x.rows() > 0, "hierarchical_aggregate: empty input");
  const Eigen::Index out_rows = (x.rows() + group - 1) / group;
  Mat out(out_rows, x.cols());
  for (Eigen::Index g = 0; g < out_rows; ++g) {
    const Eigen::Index start = g * group;
    const Eigen::Index len = std::min(group, x.rows() - start);
    out.row(g) = x.middleRows(start, len).colwise().mean();
  }
  return out;
}

// Frame rows -> phone rows (5 frames each) -> word rows (5 phones each).
inline Mat hierarchical_aggregate(const Mat& frame_features, Level level) {
  switch (level) {
    case Level::kFrame: return frame_features;
    case Level::kPhone: return average_groups(frame_features, kUnitsPerLevel);
    case Level::kWord: return average_groups(average_groups(frame_features, kUnitsPerLevel), kUnitsPerLevel);
  }
  return frame_features;
}

enum class Bucket { kLow, kMid, kHigh };

inline std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::kLow: return "low";
    case Bucket::kMid: return "mid";
    case Bucket::kHigh: return "high";
  }
  return "mid";
}

struct PercentileThresholds {
  double low = 0.0;   // values <= low fall in the low bucket
  double high = 0.0;  // values >= high fall in the high bucket
};

// Nearest-rank thresholds taken from each end of the sorted list: `low` is
// the ceil(low_pct% * n)-th smallest value, `high` the ceil(high_pct% * n)-th
// largest.
inline PercentileThresholds percentile_thresholds(std::vector<double> values, double low_pct = 30.0,
                                                  double high_pct = 30.0) {
  require(!values.empty(), "bucketize_by_percentile: empty input");
  for (double v : values) require(std::isfinite(v), "bucketize_by_percentile: non-finite value");
  require(low_pct > 0.0 && low_pct <= 100.0 && high_pct > 0.0 && high_pct <= 100.0,
          "bucketize_by_percentile: percentages must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const auto k_low = static_cast<std::size_t>(std::max(1.0, std::ceil(low_pct / 100.0 * n - 1e-9)));
  const auto k_high = static_cast<std::size_t>(std::max(1.0, std::ceil(high_pct / 100.0 * n - 1e-9)));
  return {values[k_low - 1], values[values.size() - k_high]};
}

// Values in both tails at once (coinciding thresholds) are assigned mid.
inline std::vector<Bucket> bucketize_by_percentile(const std::vector<double>& values, double low_pct = 30.0,
                                                   double high_pct = 30.0) {
  const auto t = percentile_thresholds(values, low_pct, high_pct);
  std::vector<Bucket> out;
  out.reserve(values.size());
  for (double v : values) {
    const bool lo = v <= t.low;
    const bool hi = v >= t.high;
    out.push_back(lo == hi ? Bucket::kMid : (lo ? Bucket::kLow : Bucket::kHigh));
  }
  return out;
}

}  // namespace sertk::dsp
