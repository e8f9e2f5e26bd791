#pragma once

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "sertk/dsp/framing.hpp"
#include "sertk/error.hpp"

namespace sertk::dsp {

struct FormantConfig {
  int order = 0;  // 0 selects 2 + sample_rate / 1000
  double pre_emphasis = 0.97;
  double max_bandwidth_hz = 400.0;
  double min_frequency_hz = 90.0;

  int resolved_order(int sample_rate) const {
    return order > 0 ? order : 2 + static_cast<int>(std::lround(sample_rate / 1000.0));
  }
};

struct FrameFormants {
  std::array<double, 3> freq_hz{};        // 0 when fewer roots qualified
  std::array<double, 3> rel_energy_db{};  // envelope dB at the formant minus frame energy dB
  int found = 0;                          // number of qualifying roots reported (<= 3)
  bool lpc_ok = false;                    // false when the recursion was unstable
  bool reliable = false;                  // frame was voiced
};

struct FormantTrack {
  std::vector<FrameFormants> frames;
  std::size_t skipped_unstable = 0;  // LPC failures
  std::size_t incomplete = 0;        // frames with fewer than three formants
};

struct LpcResult {
  std::vector<double> a;  // a[0] = 1, A(z) = sum a[k] z^-k
  double error = 0.0;     // final prediction error power
  double energy = 0.0;    // r[0]
};

// Levinson-Durbin on the autocorrelation of `x`. Returns nullopt when the
// prediction error stops being positive.
inline std::optional<LpcResult> lpc(const std::vector<double>& x, int order) {
  std::vector<double> r(order + 1, 0.0);
  for (int k = 0; k <= order; ++k)
    for (std::size_t n = k; n < x.size(); ++n) r[k] += x[n] * x[n - k];
  if (!(r[0] > 0.0)) return std::nullopt;
  LpcResult out;
  out.energy = r[0];
  out.a.assign(order + 1, 0.0);
  out.a[0] = 1.0;
  double err = r[0];
  std::vector<double> prev;
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += out.a[j] * r[i - j];
    const double k = -acc / err;
    prev = out.a;
    for (int j = 1; j < i; ++j) out.a[j] = prev[j] + k * prev[i - j];
    out.a[i] = k;
    err *= (1.0 - k * k);
    if (!(err > 0.0)) return std::nullopt;
  }
  out.error = err;
  return out;
}

// LPC envelope power in dB at frequency f.
inline double lpc_envelope_db(const LpcResult& m, double f_hz, int sample_rate) {
  const double w = 2.0 * std::numbers::pi * f_hz / sample_rate;
  std::complex<double> a = 0.0;
  for (std::size_t k = 0; k < m.a.size(); ++k) a += m.a[k] * std::polar(1.0, -w * static_cast<double>(k));
  return 10.0 * std::log10(m.error / std::max(std::norm(a), 1e-300));
}

inline FrameFormants formants_of_frame(const Eigen::Ref<const Vec>& raw, int sample_rate,
                                       const FormantConfig& cfg) {
  const int order = cfg.resolved_order(sample_rate);
  const Eigen::Index n = raw.size();
  const Vec win = make_window(Window::kHamming, static_cast<int>(n));
  std::vector<double> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prev = i > 0 ? raw(i - 1) : 0.0;
    y[i] = (raw(i) - cfg.pre_emphasis * prev) * win(i);
  }
  FrameFormants out;
  const auto model = lpc(y, order);
  if (!model) return out;
  out.lpc_ok = true;

  // Coefficients in increasing powers of z for z^p + a1 z^(p-1) + ... + ap.
  Vec coeffs(order + 1);
  for (int k = 0; k <= order; ++k) coeffs(k) = model->a[order - k];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(coeffs);
  std::vector<double> freqs;
  for (const auto& z : solver.roots()) {
    if (z.imag() <= 0.0) continue;
    const double f = std::atan2(z.imag(), z.real()) * sample_rate / (2.0 * std::numbers::pi);
    const double bw = -std::log(std::abs(z)) * sample_rate / std::numbers::pi;
    if (f > cfg.min_frequency_hz && bw < cfg.max_bandwidth_hz && f < sample_rate / 2.0) freqs.push_back(f);
  }
  std::sort(freqs.begin(), freqs.end());
  const double frame_db = 10.0 * std::log10(model->energy);
  out.found = static_cast<int>(std::min<std::size_t>(3, freqs.size()));
  for (int i = 0; i < out.found; ++i) {
    out.freq_hz[i] = freqs[i];
    out.rel_energy_db[i] = lpc_envelope_db(*model, freqs[i], sample_rate) - frame_db;
  }
  return out;
}

// LPC formant tracking over raw (unwindowed) frames. `voiced` marks which
// frames count as reliable; pass an empty vector to treat all as reliable.
inline FormantTrack formants_lpc(const Frames& frames, const std::vector<bool>& voiced = {},
                                 const FormantConfig& cfg = {}) {
  require(voiced.empty() || voiced.size() == static_cast<std::size_t>(frames.count()),
          "formants_lpc: voicing mask length differs from frame count");
  FormantTrack track;
  track.frames.reserve(frames.count());
  for (Eigen::Index i = 0; i < frames.count(); ++i) {
    auto ff = formants_of_frame(frames.raw.row(i).transpose(), frames.sample_rate, cfg);
    ff.reliable = voiced.empty() || voiced[i];
    if (!ff.lpc_ok)
      ++track.skipped_unstable;
    else if (ff.found < 3)
      ++track.incomplete;
    track.frames.push_back(ff);
  }
  return track;
}

}  // namespace sertk::dsp
