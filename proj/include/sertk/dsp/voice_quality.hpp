#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sertk/dsp/pitch.hpp"
#include "sertk/error.hpp"

namespace sertk::dsp {

struct Perturbation {
  double jitter_local = 0.0;   // mean |T_i - T_{i-1}| / mean T
  double shimmer_local = 0.0;  // mean |A_i - A_{i-1}| / mean A
};

// Local jitter and shimmer over the cycle list. Differences are taken only
// between consecutive cycles of the same voiced region.
inline Perturbation jitter_shimmer(const PitchTrack& track) {
  require(track.periods.size() == track.cycle_peaks.size(), "jitter_shimmer: period/peak count mismatch");
  const std::size_t n = track.periods.size();
  std::vector<bool> breaks(n, false);
  for (std::size_t s : track.region_starts)
    if (s < n) breaks[s] = true;

  double dp = 0.0, da = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (breaks[i]) continue;
    dp += std::abs(track.periods[i] - track.periods[i - 1]);
    da += std::abs(track.cycle_peaks[i] - track.cycle_peaks[i - 1]);
    ++pairs;
  }
  require(pairs >= 1, "jitter_shimmer: undefined, fewer than 2 consecutive voiced cycles");

  double mean_p = 0.0, mean_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_p += track.periods[i];
    mean_a += std::abs(track.cycle_peaks[i]);
  }
  mean_p /= static_cast<double>(n);
  mean_a /= static_cast<double>(n);
  require(mean_p > 0.0 && mean_a > 0.0, "jitter_shimmer: degenerate cycles");

  Perturbation out;
  out.jitter_local = (dp / pairs) / mean_p;
  out.shimmer_local = (da / pairs) / mean_a;
  return out;
}

inline constexpr double kHnrFloorDb = -100.0;
inline constexpr double kHnrCeilDb = 100.0;

// Harmonics-to-noise ratio from the normalized autocorrelation peak r of
// each voiced frame: 10 log10(r / (1 - r)). Unvoiced frames get `floor_db`.
inline std::vector<double> hnr(const PitchTrack& track, double floor_db = kHnrFloorDb) {
  std::vector<double> out(track.f0.size(), floor_db);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!track.voiced[i]) continue;
    const double r = std::clamp(track.strength[i], 0.0, 1.0);
    if (r >= 1.0) {
      out[i] = kHnrCeilDb;
    } else if (r <= 0.0) {
      out[i] = kHnrFloorDb;
    } else {
      out[i] = std::clamp(10.0 * std::log10(r / (1.0 - r)), kHnrFloorDb, kHnrCeilDb);
    }
  }
  return out;
}

}  // namespace sertk::dsp
