#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "sertk/error.hpp"
#include "sertk/io/wav.hpp"
#include "sertk/matrix.hpp"

namespace sertk::dsp {

enum class Window { kHann, kHamming };

inline Window parse_window(std::string_view s) {
  if (s == "hann") return Window::kHann;
  if (s == "hamming") return Window::kHamming;
  throw InputError("unknown window '" + std::string(s) + "' (expected hann|hamming)");
}

struct FrameConfig {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  Window window = Window::kHann;

  void validate() const {
    require(hop_ms > 0.0 && frame_len_ms >= hop_ms, "frame config requires frame_len_ms >= hop_ms > 0");
  }
  int frame_samples(int sample_rate) const {
    return static_cast<int>(std::lround(frame_len_ms * sample_rate / 1000.0));
  }
  int hop_samples(int sample_rate) const {
    return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
  }
};

// Symmetric window of length n.
inline Vec make_window(Window w, int n) {
  Vec out(n);
  if (n == 1) {
    out(0) = 1.0;
    return out;
  }
  const double a0 = w == Window::kHann ? 0.5 : 0.54;
  for (int i = 0; i < n; ++i)
    out(i) = a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return out;
}

// Frames of one signal. `raw` keeps the unwindowed samples for analyses that
// apply their own preprocessing (pitch, LPC); `windowed` has the configured
// window applied. Row i starts at sample i * hop.
struct Frames {
  Mat raw;
  Mat windowed;
  int sample_rate = 0;
  int frame_len = 0;
  int hop = 0;

  Eigen::Index count() const { return raw.rows(); }
};

inline Eigen::Index frame_count(std::size_t signal_len, int frame_len, int hop) {
  if (signal_len < static_cast<std::size_t>(frame_len)) return 0;
  return static_cast<Eigen::Index>((signal_len - frame_len) / hop + 1);
}

inline Frames frame_signal(const AudioBuffer& audio, const FrameConfig& cfg) {
  cfg.validate();
  require(audio.sample_rate > 0, "frame_signal: sample rate must be positive");
  Frames f;
  f.sample_rate = audio.sample_rate;
  f.frame_len = cfg.frame_samples(audio.sample_rate);
  f.hop = std::max(1, cfg.hop_samples(audio.sample_rate));
  require(f.frame_len >= 1, "frame_signal: frame shorter than one sample");
  require(audio.samples.size() >= static_cast<std::size_t>(f.frame_len),
          "frame_signal: audio shorter than one frame");
  const Eigen::Index n = frame_count(audio.samples.size(), f.frame_len, f.hop);
  const Vec win = make_window(cfg.window, f.frame_len);
  f.raw.resize(n, f.frame_len);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < f.frame_len; ++j) f.raw(i, j) = audio.samples[i * f.hop + j];
  f.windowed = f.raw * win.asDiagonal();
  return f;
}

}  // namespace sertk::dsp
