#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sertk/dsp/aggregate.hpp"
#include "sertk/dsp/formants.hpp"
#include "sertk/dsp/framing.hpp"
#include "sertk/dsp/mfcc.hpp"
#include "sertk/dsp/pitch.hpp"
#include "sertk/dsp/spectral.hpp"
#include "sertk/dsp/voice_quality.hpp"
#include "sertk/matrix.hpp"

namespace sertk::dsp {

struct ExtractConfig {
  FrameConfig frame;
  PitchConfig pitch;
  FormantConfig formant;
  SpectralConfig spectral;
  MfccConfig mfcc;
  double loudness_floor_rms = 1e-10;
};

// Frame-level descriptor matrix plus the utterance-level perturbation scalars.
struct FeatureMatrix {
  Matrix frames;
  std::optional<double> jitter_local;   // absent when fewer than two cycles were found
  std::optional<double> shimmer_local;
  std::size_t voiced_frames = 0;
  std::size_t formant_unstable_frames = 0;
  std::size_t formant_incomplete_frames = 0;
  std::set<std::string> unavailable;  // descriptor columns zero-filled because the band is out of range
};

// Stable column order of FeatureMatrix::frames.
inline std::vector<std::string> feature_column_names(int n_mfcc = 40) {
  std::vector<std::string> names{"loudness",         "hnr_db",          "f0_hz",
                                 "F1_hz",            "F2_hz",           "F3_hz",
                                 "F1_rel_energy_db", "F2_rel_energy_db", "F3_rel_energy_db",
                                 "alpha_ratio_db",   "hammarberg_db",   "slope_0_500",
                                 "slope_500_1500",   "h1_h2_db",        "h1_a3_db"};
  for (int i = 0; i < n_mfcc; ++i) names.push_back("mfcc_" + std::to_string(i));
  return names;
}

inline FeatureMatrix extract_features(const AudioBuffer& audio, const ExtractConfig& cfg = {}) {
  const Frames frames = frame_signal(audio, cfg.frame);
  const PitchTrack track = track_pitch(audio, cfg.frame, cfg.pitch);
  ensure(track.f0.size() == static_cast<std::size_t>(frames.count()),
         "pitch track and framing disagree on frame count");
  const auto hnr_db = hnr(track);
  const auto formants = formants_lpc(frames, track.voiced, cfg.formant);

  std::vector<double> f3(track.f0.size(), 0.0);
  for (std::size_t i = 0; i < f3.size(); ++i)
    if (track.voiced[i]) f3[i] = formants.frames[i].freq_hz[2];
  const auto spectral = spectral_descriptors(frames, track.f0, f3, cfg.spectral);
  const Mat cepstra = mfcc(frames, cfg.mfcc);

  const auto names = feature_column_names(cfg.mfcc.n_coeffs);
  const Eigen::Index n = frames.count();
  Mat m = Mat::Zero(n, static_cast<Eigen::Index>(names.size()));
  FeatureMatrix out;
  auto opt = [&](const std::optional<double>& v, const char* name) {
    if (v) return *v;
    out.unavailable.insert(name);
    return 0.0;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rms = std::sqrt(frames.raw.row(i).squaredNorm() / frames.frame_len);
    m(i, 0) = 20.0 * std::log10(std::max(rms, cfg.loudness_floor_rms));
    m(i, 1) = hnr_db[i];
    m(i, 2) = track.f0[i];
    const auto& ff = formants.frames[i];
    if (track.voiced[i]) {
      for (int k = 0; k < 3; ++k) {
        m(i, 3 + k) = ff.freq_hz[k];
        m(i, 6 + k) = ff.rel_energy_db[k];
      }
    }
    const auto& sd = spectral[i];
    m(i, 9) = opt(sd.alpha_ratio_db, "alpha_ratio_db");
    m(i, 10) = opt(sd.hammarberg_db, "hammarberg_db");
    m(i, 11) = opt(sd.slope_0_500, "slope_0_500");
    m(i, 12) = opt(sd.slope_500_1500, "slope_500_1500");
    if (track.voiced[i]) {
      m(i, 13) = sd.h1_h2_db.value_or(0.0);
      m(i, 14) = sd.h1_a3_db.value_or(0.0);
    }
    m.row(i).tail(cepstra.cols()) = cepstra.row(i);
  }
  out.frames = Matrix(std::move(m), names);
  out.voiced_frames = track.voiced_count();
  out.formant_unstable_frames = formants.skipped_unstable;
  out.formant_incomplete_frames = formants.incomplete;
  try {
    const auto p = jitter_shimmer(track);
    out.jitter_local = p.jitter_local;
    out.shimmer_local = p.shimmer_local;
  } catch (const InputError&) {
    // too few cycles: the scalars stay absent
  }
  return out;
}

}  // namespace sertk::dsp
