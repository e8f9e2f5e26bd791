#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sertk/dsp/framing.hpp"
#include "sertk/error.hpp"
#include "sertk/io/wav.hpp"

namespace sertk::dsp {

struct PitchConfig {
  double f0_min = 60.0;
  double f0_max = 500.0;
  double voicing_threshold = 0.45;
  // Among candidate lags, the shortest one whose correlation reaches this
  // fraction of the best candidate wins. Suppresses octave-down errors.
  double octave_ratio = 0.9;
};

// Frame-level F0 plus the glottal-cycle list used for jitter and shimmer.
// Cycle i spans periods[i] seconds and starts at a peak of amplitude
// cycle_peaks[i]. region_starts lists the cycle indices where a new voiced
// region begins; perturbation measures never difference across regions.
struct PitchTrack {
  std::vector<double> f0;        // Hz, 0 when unvoiced
  std::vector<bool> voiced;
  std::vector<double> strength;  // interpolated normalized autocorrelation peak
  std::vector<double> periods;
  std::vector<double> cycle_peaks;
  std::vector<std::size_t> region_starts;
  double f0_min = 0.0;
  double f0_max = 0.0;

  std::size_t voiced_count() const {
    return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
  }
};

namespace detail {

// Parabolic vertex through (-1, a), (0, b), (1, c); returns {offset, value}.
inline std::pair<double, double> parabolic_peak(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return {0.0, b};
  const double delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  return {delta, b - 0.25 * (a - c) * delta};
}

// Normalized cross-correlation of the window starting at `start` with the
// same-length window `lag` samples later. Out-of-range samples read as 0.
inline double nccf(const std::vector<double>& x, std::size_t start, int len, int lag, double mean) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  const std::size_t n = x.size();
  for (int i = 0; i < len; ++i) {
    const std::size_t p = start + i;
    const std::size_t q = p + lag;
    const double a = p < n ? x[p] - mean : 0.0;
    const double b = q < n ? x[q] - mean : 0.0;
    num += a * b;
    e0 += a * a;
    e1 += b * b;
  }
  const double denom = std::sqrt(e0 * e1);
  if (!(denom > 0.0)) return 0.0;
  return num / denom;
}

struct LagPeak {
  double lag = 0.0;
  double value = 0.0;
};

inline LagPeak best_lag(const std::vector<double>& r, int lag_lo, const PitchConfig& cfg) {
  // r[k] holds lag (lag_lo - 1 + k); the guard entries make edge peaks detectable.
  std::vector<LagPeak> peaks;
  for (std::size_t k = 1; k + 1 < r.size(); ++k) {
    if (r[k] >= r[k - 1] && r[k] > r[k + 1] && r[k] > 0.0) {
      auto [delta, value] = parabolic_peak(r[k - 1], r[k], r[k + 1]);
      peaks.push_back({lag_lo - 1 + static_cast<double>(k) + delta, std::min(value, 1.0)});
    }
  }
  if (peaks.empty()) return {};
  double best = 0.0;
  for (const auto& p : peaks) best = std::max(best, p.value);
  for (const auto& p : peaks)
    if (p.value >= cfg.octave_ratio * best) return p;
  return peaks.front();
}

inline std::pair<double, double> refine_extremum(const std::vector<double>& x, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return {static_cast<double>(i), x[i]};
  auto [delta, value] = parabolic_peak(x[i - 1], x[i], x[i + 1]);
  return {static_cast<double>(i) + delta, value};
}

inline std::size_t argmax_in(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

}  // namespace detail

// Autocorrelation pitch tracker. Each frame is scored with the normalized
// cross-correlation over lags [sr/f0_max, sr/f0_min]; the frame is voiced
// when the chosen peak reaches the voicing threshold.
inline PitchTrack track_pitch(const AudioBuffer& audio, const FrameConfig& fcfg,
                              const PitchConfig& cfg = {}) {
  fcfg.validate();
  require(cfg.f0_min > 0.0 && cfg.f0_min < cfg.f0_max, "track_pitch: requires 0 < f0_min < f0_max");
  require(audio.sample_rate >= 8.0 * cfg.f0_max,
          "track_pitch: sample rate too low for the f0 range (need >= 8 * f0_max)");
  const int sr = audio.sample_rate;
  const int len = fcfg.frame_samples(sr);
  const int hop = std::max(1, fcfg.hop_samples(sr));
  require(audio.samples.size() >= static_cast<std::size_t>(len), "track_pitch: audio shorter than one frame");

  const int lag_lo = std::max(2, static_cast<int>(std::floor(sr / cfg.f0_max)));
  const int lag_hi = static_cast<int>(std::ceil(sr / cfg.f0_min));
  const Eigen::Index n_frames = frame_count(audio.samples.size(), len, hop);
  const auto& x = audio.samples;

  PitchTrack track;
  track.f0_min = cfg.f0_min;
  track.f0_max = cfg.f0_max;
  track.f0.assign(n_frames, 0.0);
  track.voiced.assign(n_frames, false);
  track.strength.assign(n_frames, 0.0);
  std::vector<double> lag_of(n_frames, 0.0);

  std::vector<double> r(lag_hi - lag_lo + 3);
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    const std::size_t start = static_cast<std::size_t>(f) * hop;
    const std::size_t span_end = std::min(x.size(), start + len + lag_hi + 1);
    double mean = 0.0;
    for (std::size_t i = start; i < span_end; ++i) mean += x[i];
    mean /= static_cast<double>(span_end - start);
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = detail::nccf(x, start, len, lag_lo - 1 + static_cast<int>(k), mean);
    const auto peak = detail::best_lag(r, lag_lo, cfg);
    track.strength[f] = std::max(0.0, peak.value);
    if (peak.lag > 0.0 && peak.value >= cfg.voicing_threshold) {
      track.voiced[f] = true;
      track.f0[f] = std::clamp(sr / peak.lag, cfg.f0_min, cfg.f0_max);
      lag_of[f] = sr / track.f0[f];
    }
  }

  // Walk glottal cycles peak to peak inside each contiguous voiced region.
  Eigen::Index f = 0;
  while (f < n_frames) {
    if (!track.voiced[f]) {
      ++f;
      continue;
    }
    Eigen::Index g = f;
    while (g + 1 < n_frames && track.voiced[g + 1]) ++g;
    const std::size_t region_lo = static_cast<std::size_t>(f) * hop;
    const std::size_t region_hi = std::min(x.size(), static_cast<std::size_t>(g) * hop + len);
    auto period_at = [&](std::size_t pos) {
      Eigen::Index k = static_cast<Eigen::Index>((pos >= static_cast<std::size_t>(len / 2) ? pos - len / 2 : 0) / hop);
      k = std::clamp<Eigen::Index>(k, f, g);
      return lag_of[k];
    };

    std::vector<std::pair<double, double>> marks;  // (position, amplitude)
    const double t0 = period_at(region_lo);
    std::size_t pos = detail::argmax_in(x, region_lo, std::min(region_hi, region_lo + static_cast<std::size_t>(std::ceil(t0))));
    marks.push_back(detail::refine_extremum(x, pos));
    while (true) {
      const double t = period_at(pos);
      const auto lo = static_cast<std::size_t>(std::ceil(marks.back().first + 0.75 * t));
      const auto hi = static_cast<std::size_t>(std::floor(marks.back().first + 1.25 * t)) + 1;
      if (hi > region_hi || lo >= hi) break;
      pos = detail::argmax_in(x, lo, hi);
      marks.push_back(detail::refine_extremum(x, pos));
    }
    if (marks.size() >= 2) {
      track.region_starts.push_back(track.periods.size());
      for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        track.periods.push_back((marks[i + 1].first - marks[i].first) / sr);
        track.cycle_peaks.push_back(marks[i].second);
      }
    }
    f = g + 1;
  }
  return track;
}

}  // namespace sertk::dsp
