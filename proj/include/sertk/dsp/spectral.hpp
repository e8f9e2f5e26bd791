#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sertk/dsp/framing.hpp"
#include "sertk/dsp/spectrum.hpp"
#include "sertk/error.hpp"

namespace sertk::dsp {

// Per-frame spectral balance descriptors. A descriptor is nullopt when its
// band does not fit below Nyquist or (for harmonic measures) the frame has no F0.
struct SpectralDescriptors {
  std::optional<double> alpha_ratio_db;
  std::optional<double> hammarberg_db;
  std::optional<double> slope_0_500;     // dB per Hz
  std::optional<double> slope_500_1500;  // dB per Hz
  std::optional<double> h1_h2_db;
  std::optional<double> h1_a3_db;
};

struct SpectralConfig {
  int min_fft_size = 0;  // FFT size is the next power of two >= max(frame length, this)
};

namespace detail {

inline constexpr double kPowerFloor = 1e-300;

inline double to_db(double power) { return 10.0 * std::log10(std::max(power, kPowerFloor)); }

inline double bin_hz(int k, int fft_size, int sr) { return static_cast<double>(k) * sr / fft_size; }

// Inclusive bin range [lo, hi] covering frequencies in [f_lo, f_hi].
inline std::pair<int, int> band_bins(double f_lo, double f_hi, int fft_size, int sr) {
  const int lo = static_cast<int>(std::ceil(f_lo * fft_size / sr));
  const int hi = static_cast<int>(std::floor(f_hi * fft_size / sr));
  return {lo, std::min(hi, fft_size / 2)};
}

inline double band_sum(const Vec& p, int lo, int hi) {
  double s = 0.0;
  for (int k = lo; k <= hi; ++k) s += p(k);
  return s;
}

inline double band_peak_db(const Vec& p, int lo, int hi) {
  double m = 0.0;
  for (int k = lo; k <= hi; ++k) m = std::max(m, p(k));
  return to_db(m);
}

// Least-squares slope of dB spectrum against frequency in Hz.
inline double band_slope(const Vec& p, int lo, int hi, int fft_size, int sr) {
  const int n = hi - lo + 1;
  double mx = 0.0, my = 0.0;
  for (int k = lo; k <= hi; ++k) {
    mx += bin_hz(k, fft_size, sr);
    my += to_db(p(k));
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double dx = bin_hz(k, fft_size, sr) - mx;
    sxy += dx * (to_db(p(k)) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// dB level of the spectral peak nearest `f_hz`, searched within +-half a
// harmonic spacing and refined by a parabola through the dB values.
inline double harmonic_level_db(const Vec& p, double f_hz, double f0, int fft_size, int sr) {
  const int top = static_cast<int>(p.size()) - 1;
  const double half = std::max(0.5 * f0, 1.5 * sr / static_cast<double>(fft_size));
  const int lo = std::max(0, static_cast<int>(std::floor((f_hz - half) * fft_size / sr)));
  const int hi = std::min(top, static_cast<int>(std::ceil((f_hz + half) * fft_size / sr)));
  int best = lo;
  for (int k = lo; k <= hi; ++k)
    if (p(k) > p(best)) best = k;
  if (best == 0 || best == top) return to_db(p(best));
  const double a = to_db(p(best - 1)), b = to_db(p(best)), c = to_db(p(best + 1));
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return b;
  const double delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  return b - 0.25 * (a - c) * delta;
}

}  // namespace detail

// Descriptors of one frame's power spectrum. f0 and f3 are in Hz; pass 0
// when unknown.
inline SpectralDescriptors spectral_descriptors_of(const Vec& power, int fft_size, int sr, double f0,
                                                   double f3) {
  using namespace detail;
  SpectralDescriptors d;
  const double nyquist = sr / 2.0;
  if (nyquist >= 5000.0) {
    const auto [l0, l1] = band_bins(50.0, 1000.0 - 1e-9, fft_size, sr);
    const auto [h0, h1] = band_bins(1000.0, 5000.0, fft_size, sr);
    d.alpha_ratio_db = to_db(band_sum(power, l0, l1)) - to_db(band_sum(power, h0, h1));
    const auto [a0, a1] = band_bins(0.0, 2000.0, fft_size, sr);
    const auto [b0, b1] = band_bins(2000.0, 5000.0, fft_size, sr);
    d.hammarberg_db = band_peak_db(power, a0, a1) - band_peak_db(power, b0, b1);
  }
  if (nyquist >= 1500.0) {
    const auto [s0, s1] = band_bins(0.0, 500.0, fft_size, sr);
    const auto [t0, t1] = band_bins(500.0, 1500.0, fft_size, sr);
    if (s1 > s0) d.slope_0_500 = band_slope(power, s0, s1, fft_size, sr);
    if (t1 > t0) d.slope_500_1500 = band_slope(power, t0, t1, fft_size, sr);
  }
  if (f0 > 0.0 && 2.0 * f0 < nyquist) {
    const double h1 = harmonic_level_db(power, f0, f0, fft_size, sr);
    d.h1_h2_db = h1 - harmonic_level_db(power, 2.0 * f0, f0, fft_size, sr);
    if (f3 > 0.0) {
      const double k = std::max(1.0, std::round(f3 / f0));
      if (k * f0 < nyquist) d.h1_a3_db = h1 - harmonic_level_db(power, k * f0, f0, fft_size, sr);
    }
  }
  return d;
}

inline int spectral_fft_size(int frame_len, const SpectralConfig& cfg) {
  return next_pow2(std::max(frame_len, cfg.min_fft_size));
}

// Per-frame descriptors over windowed frames. f0 / f3 may be empty (treated
// as unknown) or hold one value per frame.
inline std::vector<SpectralDescriptors> spectral_descriptors(const Frames& frames,
                                                             const std::vector<double>& f0 = {},
                                                             const std::vector<double>& f3 = {},
                                                             const SpectralConfig& cfg = {}) {
  const auto n = static_cast<std::size_t>(frames.count());
  require(f0.empty() || f0.size() == n, "spectral_descriptors: f0 length differs from frame count");
  require(f3.empty() || f3.size() == n, "spectral_descriptors: f3 length differs from frame count");
  const int fft_size = spectral_fft_size(frames.frame_len, cfg);
  std::vector<SpectralDescriptors> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec p = power_spectrum(frames.windowed.row(i).transpose(), fft_size);
    out.push_back(spectral_descriptors_of(p, fft_size, frames.sample_rate, f0.empty() ? 0.0 : f0[i],
                                          f3.empty() ? 0.0 : f3[i]));
  }
  return out;
}

}  // namespace sertk::dsp
