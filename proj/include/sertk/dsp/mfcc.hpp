#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sertk/dsp/framing.hpp"
#include "sertk/dsp/spectrum.hpp"
#include "sertk/error.hpp"

namespace sertk::dsp {

struct MfccConfig {
  int n_coeffs = 40;
  int n_mels = 64;
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;  // 0 selects Nyquist
  double log_floor = 1e-10;
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular HTK-style mel filters over bins 0..fft_size/2; rows are filters.
inline Mat mel_filterbank(int n_mels, int fft_size, int sample_rate, double f_low, double f_high) {
  const int n_bins = fft_size / 2 + 1;
  const double m_lo = hz_to_mel(f_low), m_hi = hz_to_mel(f_high);
  Vec edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) edges(i) = mel_to_hz(m_lo + (m_hi - m_lo) * i / (n_mels + 1));
  Mat fb = Mat::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double l = edges(m), c = edges(m + 1), r = edges(m + 2);
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      if (f > l && f < r) fb(m, k) = f <= c ? (f - l) / (c - l) : (r - f) / (r - c);
    }
  }
  return fb;
}

// Orthonormal DCT-II matrix; row k is basis function k.
inline Mat dct2_matrix(int n_out, int n_in) {
  Mat d(n_out, n_in);
  for (int k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_in);
    for (int n = 0; n < n_in; ++n)
      d(k, n) = scale * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) / (2.0 * n_in));
  }
  return d;
}

// log-mel filterbank energies (natural log, floored) followed by an
// orthonormal DCT-II; returns frames x n_coeffs.
inline Mat mfcc(const Frames& frames, const MfccConfig& cfg = {}) {
  require(frames.sample_rate >= 8000, "mfcc: sample rate must be at least 8 kHz");
  require(cfg.n_coeffs >= 1 && cfg.n_mels >= 1, "mfcc: coefficient and filter counts must be positive");
  require(cfg.n_coeffs <= cfg.n_mels, "mfcc: n_coeffs must not exceed n_mels");
  const int fft_size = next_pow2(frames.frame_len);
  const double f_high = cfg.f_high_hz > 0.0 ? cfg.f_high_hz : frames.sample_rate / 2.0;
  const Mat fb = mel_filterbank(cfg.n_mels, fft_size, frames.sample_rate, cfg.f_low_hz, f_high);
  const Mat dct = dct2_matrix(cfg.n_coeffs, cfg.n_mels);
  const Mat power = power_spectra(frames.windowed, fft_size);
  const Mat log_mel = (power * fb.transpose()).array().max(cfg.log_floor).log().matrix();
  return log_mel * dct.transpose();
}

}  // namespace sertk::dsp
