#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sertk/dsp/aggregate.hpp"
#include "sertk/dsp/features.hpp"
#include "sertk/dsp/formants.hpp"
#include "sertk/dsp/framing.hpp"
#include "sertk/dsp/mfcc.hpp"
#include "sertk/dsp/pitch.hpp"
#include "sertk/dsp/spectral.hpp"
#include "sertk/dsp/voice_quality.hpp"
#include "support/synth.hpp"

namespace sertk::dsp {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

double median_voiced_f0(const PitchTrack& t) {
  std::vector<double> v;
  for (std::size_t i = 0; i < t.f0.size(); ++i)
    if (t.voiced[i]) v.push_back(t.f0[i]);
  return median(v);
}

PitchTrack pitch_of(const AudioBuffer& a) { return track_pitch(a, FrameConfig{}, PitchConfig{}); }

TEST(Framing, OneSecondAt16k) {
  AudioBuffer a{std::vector<double>(16000, 0.0), 16000};
  const auto f = frame_signal(a, FrameConfig{});
  EXPECT_EQ(f.count(), 98);
  EXPECT_EQ(f.frame_len, 400);
  EXPECT_EQ(f.hop, 160);
  EXPECT_TRUE(f.raw.isZero());
  EXPECT_TRUE(f.windowed.isZero());
}

TEST(Framing, FrameEqualsSignal) {
  AudioBuffer a{std::vector<double>(400, 0.1), 16000};
  const auto f = frame_signal(a, FrameConfig{25.0, 25.0, Window::kHamming});
  EXPECT_EQ(f.count(), 1);
}

TEST(Framing, RejectsBadConfig) {
  AudioBuffer a{std::vector<double>(1000, 0.0), 16000};
  EXPECT_THROW(frame_signal(a, FrameConfig{10.0, 20.0}), InputError);
  EXPECT_THROW(frame_signal(AudioBuffer{std::vector<double>(10, 0.0), 16000}, FrameConfig{}), InputError);
  EXPECT_THROW(parse_window("kaiser"), InputError);
}

class SinePitch : public ::testing::TestWithParam<double> {};

TEST_P(SinePitch, MedianWithinTwoPercent) {
  const double f0 = GetParam();
  const auto t = pitch_of(testing::sine(f0, 1.0));
  EXPECT_GT(t.voiced_count(), 90u);
  EXPECT_NEAR(median_voiced_f0(t), f0, 0.02 * f0);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, SinePitch, ::testing::Values(100.0, 150.0, 220.0, 330.0, 440.0));

TEST(Pitch, LowLevelNoiseMostlyUnvoiced) {
  const auto t = pitch_of(testing::white_noise(1.0, 16000, 0.01));
  EXPECT_LT(static_cast<double>(t.voiced_count()) / t.f0.size(), 0.2);
}

TEST(Pitch, SilenceAllUnvoiced) {
  const auto t = pitch_of(AudioBuffer{std::vector<double>(16000, 0.0), 16000});
  EXPECT_EQ(t.voiced_count(), 0u);
  for (double f : t.f0) EXPECT_EQ(f, 0.0);
}

TEST(Pitch, RejectsLowSampleRate) {
  EXPECT_THROW(pitch_of(testing::sine(100.0, 1.0, 2000)), InputError);
}

TEST(Pitch, CircularShiftByOneHopIsStable) {
  auto a = testing::sawtooth(180.0, 1.0);
  const double before = median_voiced_f0(pitch_of(a));
  std::rotate(a.samples.begin(), a.samples.begin() + 160, a.samples.end());
  const double after = median_voiced_f0(pitch_of(a));
  EXPECT_LT(std::abs(after - before) / before, 0.01);
}

TEST(VoiceQuality, PeriodicToneHasNoPerturbation) {
  for (double f0 : {100.0, 220.0, 440.0}) {
    const auto p = jitter_shimmer(pitch_of(testing::sine(f0, 1.0)));
    EXPECT_LT(p.jitter_local, 1e-3) << f0;
    EXPECT_LT(p.shimmer_local, 1e-3) << f0;
  }
}

TEST(VoiceQuality, AlternatingPeriods) {
  PitchTrack t;
  for (int i = 0; i < 20; ++i) {
    t.periods.push_back(i % 2 == 0 ? 4.5e-3 : 5.5e-3);
    t.cycle_peaks.push_back(0.5);
  }
  t.region_starts = {0};
  const auto p = jitter_shimmer(t);
  EXPECT_NEAR(p.jitter_local, 0.2, 1e-12);
  EXPECT_EQ(p.shimmer_local, 0.0);
}

TEST(VoiceQuality, TimeReversalSymmetry) {
  PitchTrack t;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(4e-3, 6e-3), a(0.2, 0.8);
  for (int i = 0; i < 30; ++i) {
    t.periods.push_back(u(rng));
    t.cycle_peaks.push_back(a(rng));
  }
  t.region_starts = {0};
  PitchTrack r = t;
  std::reverse(r.periods.begin(), r.periods.end());
  std::reverse(r.cycle_peaks.begin(), r.cycle_peaks.end());
  const auto p = jitter_shimmer(t), q = jitter_shimmer(r);
  EXPECT_NEAR(p.jitter_local, q.jitter_local, 1e-15);
  EXPECT_NEAR(p.shimmer_local, q.shimmer_local, 1e-15);
}

TEST(VoiceQuality, AmplitudeModulationMovesShimmerOnly) {
  auto a = testing::sine(200.0, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    a.samples[i] *= 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * 4.0 * i / a.sample_rate);
  const auto p = jitter_shimmer(pitch_of(a));
  EXPECT_LT(p.jitter_local, 1e-3);
  EXPECT_GT(p.shimmer_local, 1e-3);
}

TEST(VoiceQuality, SingleCycleIsUndefined) {
  PitchTrack t;
  t.periods = {5e-3};
  t.cycle_peaks = {0.5};
  t.region_starts = {0};
  EXPECT_THROW(jitter_shimmer(t), InputError);
}

TEST(VoiceQuality, HnrOfPureSine) {
  const auto t = pitch_of(testing::sine(220.0, 1.0));
  const auto h = hnr(t);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (t.voiced[i]) {
      EXPECT_GE(h[i], 30.0);
    }
}

TEST(VoiceQuality, HnrOfEqualPowerMixtureNearZero) {
  auto a = testing::sine(220.0, 2.0, 16000, 0.4);
  const auto noise = testing::white_noise(2.0, 16000, 0.4 / std::sqrt(2.0), 11);
  for (std::size_t i = 0; i < a.size(); ++i) a.samples[i] += noise.samples[i];
  const auto t = pitch_of(a);
  const auto h = hnr(t);
  std::vector<double> voiced;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (t.voiced[i]) voiced.push_back(h[i]);
  ASSERT_GT(voiced.size(), 10u);
  EXPECT_NEAR(median(voiced), 0.0, 3.0);
}

TEST(VoiceQuality, UnvoicedFramesGetFloor) {
  const auto t = pitch_of(AudioBuffer{std::vector<double>(8000, 0.0), 16000});
  for (double v : hnr(t)) EXPECT_EQ(v, kHnrFloorDb);
}

TEST(Formants, TwoResonanceVowel) {
  const auto a = testing::synthetic_vowel(100.0, {700.0, 1200.0}, {80.0, 80.0}, 1.0);
  const auto frames = frame_signal(a, FrameConfig{});
  const auto track = formants_lpc(frames, std::vector<bool>(static_cast<std::size_t>(frames.count()), true));
  std::vector<double> f1, f2;
  for (const auto& f : track.frames) {
    if (f.found < 2) continue;
    f1.push_back(f.freq_hz[0]);
    f2.push_back(f.freq_hz[1]);
  }
  ASSERT_GT(f1.size(), 50u);
  EXPECT_NEAR(median(f1), 700.0, 35.0);
  EXPECT_NEAR(median(f2), 1200.0, 60.0);
}

TEST(Formants, NoiseFramesAreUnreliable) {
  const auto a = testing::white_noise(0.5, 16000, 0.1);
  const auto frames = frame_signal(a, FrameConfig{});
  const auto pitch = pitch_of(a);
  const auto track = formants_lpc(frames, pitch.voiced);
  std::size_t reported = 0;
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    if (!pitch.voiced[i]) {
      EXPECT_FALSE(track.frames[i].reliable);
    }
    reported += track.frames[i].found > 0 ? 1 : 0;
  }
  EXPECT_GT(reported, 0u);
}

TEST(Formants, PureSineDegeneratePolicy) {
  const auto a = testing::sine(150.0, 0.5);
  const auto frames = frame_signal(a, FrameConfig{});
  const auto track = formants_lpc(frames);
  for (const auto& f : track.frames)
    for (double hz : f.freq_hz) EXPECT_TRUE(hz == 0.0 || hz >= 90.0);
  EXPECT_EQ(track.frames.size(), static_cast<std::size_t>(frames.count()));
}

TEST(Formants, LpcOrderDefault) {
  EXPECT_EQ(FormantConfig{}.resolved_order(16000), 18);
  EXPECT_EQ(FormantConfig{}.resolved_order(8000), 10);
}

TEST(Spectral, LowBandToneComplexHasPositiveAlphaRatio) {
  AudioBuffer a{std::vector<double>(16000, 0.0), 16000};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (double f = 100.0; f < 950.0; f += 37.0) {
    const double ph = phase(rng);
    for (std::size_t i = 0; i < a.size(); ++i) a.samples[i] += 0.02 * std::sin(2.0 * std::numbers::pi * f * i / 16000 + ph);
  }
  const auto sd = spectral_descriptors(frame_signal(a, FrameConfig{}));
  for (const auto& d : sd) {
    ASSERT_TRUE(d.alpha_ratio_db);
    EXPECT_GT(*d.alpha_ratio_db, 10.0);
  }
}

TEST(Spectral, FlatSpectrumHasZeroSlopes) {
  const auto d = spectral_descriptors_of(Vec::Constant(257, 3.0), 512, 16000, 0.0, 0.0);
  ASSERT_TRUE(d.slope_0_500 && d.slope_500_1500);
  EXPECT_LT(std::abs(*d.slope_0_500), 1e-3);
  EXPECT_LT(std::abs(*d.slope_500_1500), 1e-3);
  EXPECT_FALSE(d.h1_h2_db);
}

TEST(Spectral, SawtoothH1MinusH2) {
  const auto a = testing::sawtooth(200.0, 1.0);
  const auto frames = frame_signal(a, FrameConfig{});
  const auto t = pitch_of(a);
  const auto sd = spectral_descriptors(frames, t.f0);
  std::vector<double> v;
  for (const auto& d : sd)
    if (d.h1_h2_db) v.push_back(*d.h1_h2_db);
  ASSERT_GT(v.size(), 50u);
  EXPECT_NEAR(median(v), 20.0 * std::log10(2.0), 1.0);
}

TEST(Spectral, NarrowbandAudioLeavesHighBandsUnavailable) {
  const auto d = spectral_descriptors_of(Vec::Ones(129), 256, 8000, 0.0, 0.0);
  EXPECT_FALSE(d.alpha_ratio_db);
  EXPECT_FALSE(d.hammarberg_db);
  EXPECT_TRUE(d.slope_500_1500);
}

TEST(Mfcc, SilenceSitsAtTheLogFloor) {
  const auto frames = frame_signal(AudioBuffer{std::vector<double>(16000, 0.0), 16000}, FrameConfig{});
  const Mat c = mfcc(frames);
  ASSERT_EQ(c.rows(), 98);
  ASSERT_EQ(c.cols(), 40);
  const double c0 = std::sqrt(64.0) * std::log(1e-10);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    EXPECT_NEAR(c(i, 0), c0, 1e-9);
    for (Eigen::Index k = 1; k < c.cols(); ++k) EXPECT_NEAR(c(i, k), 0.0, 1e-9);
  }
}

TEST(Mfcc, DoublingAmplitudeShiftsOnlyC0) {
  const auto a = testing::sawtooth(150.0, 0.5, 16000, 0.2);
  const Mat c1 = mfcc(frame_signal(a, FrameConfig{}));
  const Mat c2 = mfcc(frame_signal(testing::scaled(a, 2.0), FrameConfig{}));
  const double shift = std::sqrt(64.0) * std::log(4.0);
  for (Eigen::Index i = 0; i < c1.rows(); ++i) {
    EXPECT_NEAR(c2(i, 0) - c1(i, 0), shift, 1e-6);
    for (Eigen::Index k = 1; k < c1.cols(); ++k) EXPECT_NEAR(c2(i, k), c1(i, k), 1e-6);
  }
}

TEST(Mfcc, ConfigContract) {
  const auto frames = frame_signal(testing::sine(200.0, 0.2), FrameConfig{});
  EXPECT_THROW(mfcc(frames, MfccConfig{.n_coeffs = 70, .n_mels = 64}), InputError);
  const Mat dct = dct2_matrix(8, 8);
  EXPECT_TRUE((dct * dct.transpose()).isApprox(Mat::Identity(8, 8), 1e-12));
}

TEST(Aggregate, TenFramesToTwoPhones) {
  Mat x(10, 2);
  for (Eigen::Index i = 0; i < 10; ++i) x.row(i) << static_cast<double>(i), 2.0 * i;
  const Mat p = hierarchical_aggregate(x, Level::kPhone);
  ASSERT_EQ(p.rows(), 2);
  EXPECT_DOUBLE_EQ(p(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(p(1, 0), 7.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 14.0);
}

TEST(Aggregate, RowCountsAndConstants) {
  const Mat x = Mat::Constant(98, 3, 1.25);
  const Mat p = hierarchical_aggregate(x, Level::kPhone);
  const Mat w = hierarchical_aggregate(x, Level::kWord);
  EXPECT_EQ(p.rows(), 20);
  EXPECT_EQ(w.rows(), 4);
  EXPECT_TRUE(p.isApprox(Mat::Constant(20, 3, 1.25)));
  EXPECT_TRUE(w.isApprox(Mat::Constant(4, 3, 1.25)));
  EXPECT_TRUE(hierarchical_aggregate(p, Level::kPhone).isApprox(Mat::Constant(4, 3, 1.25)));
  for (Eigen::Index n = 1; n < 40; ++n)
    EXPECT_EQ(hierarchical_aggregate(Mat::Zero(n, 1), Level::kPhone).rows(), (n + 4) / 5);
}

TEST(Percentile, OneToTen) {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  const auto b = bucketize_by_percentile(v);
  for (int i = 0; i < 10; ++i) {
    const Bucket expect = i < 3 ? Bucket::kLow : (i >= 7 ? Bucket::kHigh : Bucket::kMid);
    EXPECT_EQ(b[static_cast<std::size_t>(i)], expect) << i + 1;
  }
}

TEST(Percentile, DegenerateInputsAreMid) {
  for (auto b : bucketize_by_percentile(std::vector<double>(7, 4.0))) EXPECT_EQ(b, Bucket::kMid);
  EXPECT_EQ(bucketize_by_percentile({2.5}).front(), Bucket::kMid);
  EXPECT_THROW(bucketize_by_percentile({}), InputError);
}

TEST(Features, ColumnLayout) {
  const auto f = extract_features(testing::synthetic_vowel(120.0, {700.0, 1200.0, 2600.0}, {80.0, 90.0, 120.0}, 1.0));
  EXPECT_EQ(f.frames.cols(), 55);
  EXPECT_EQ(f.frames.rows(), 98);
  EXPECT_EQ(f.frames.column_names, feature_column_names());
  EXPECT_GT(f.voiced_frames, 80u);
  EXPECT_TRUE(f.jitter_local && f.shimmer_local);
  EXPECT_TRUE(f.unavailable.empty());
}

TEST(Features, AmplitudeInvariance) {
  const auto a = testing::synthetic_vowel(130.0, {650.0, 1100.0, 2500.0}, {80.0, 90.0, 120.0}, 0.6);
  const double c = 0.37;
  const auto f1 = extract_features(a);
  const auto f2 = extract_features(testing::scaled(a, c));
  const Mat& x = f1.frames.values;
  const Mat& y = f2.frames.values;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    EXPECT_NEAR(y(i, 0) - x(i, 0), 20.0 * std::log10(c), 1e-9);
    for (Eigen::Index col : {2, 9, 10, 11, 12, 13}) EXPECT_NEAR(y(i, col), x(i, col), 1e-6) << "column " << col;
  }
  EXPECT_NEAR(*f2.jitter_local, *f1.jitter_local, 1e-6);
  EXPECT_NEAR(*f2.shimmer_local, *f1.shimmer_local, 1e-6);
}

TEST(Features, NarrowbandMarksUnavailableColumns) {
  const auto f = extract_features(testing::sine(150.0, 0.5, 8000));
  EXPECT_TRUE(f.unavailable.contains("alpha_ratio_db"));
  EXPECT_TRUE(f.unavailable.contains("hammarberg_db"));
  EXPECT_FALSE(f.unavailable.contains("slope_0_500"));
}

}  // namespace
}  // namespace sertk::dsp
