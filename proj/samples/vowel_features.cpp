// Synthesizes a two-formant vowel, optionally saves it as WAV, and prints the
// median of a few frame-level descriptors over voiced frames.
//
//   vowel_features [out.wav]

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <vector>

#include "sertk/dsp/features.hpp"
#include "sertk/io/wav.hpp"

namespace {

sertk::AudioBuffer vowel(double f0, double f1, double f2, double seconds, int sr = 16000) {
  const auto n = static_cast<std::size_t>(seconds * sr);
  std::vector<double> x(n, 0.0);
  for (double t = 0.0; t < static_cast<double>(n); t += sr / f0) x[static_cast<std::size_t>(t)] = 1.0;
  for (double f : {f1, f2}) {
    const double r = std::exp(-std::numbers::pi * 80.0 / sr), theta = 2.0 * std::numbers::pi * f / sr;
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = x[i] + (i >= 1 ? 2.0 * r * std::cos(theta) * y[i - 1] : 0.0) - (i >= 2 ? r * r * y[i - 2] : 0.0);
    x = std::move(y);
  }
  const double peak = *std::max_element(x.begin(), x.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (auto& v : x) v = 0.8 * v / std::abs(peak);
  return {std::move(x), sr};
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  const auto audio = vowel(120.0, 700.0, 1200.0, 1.0);
  if (argc > 1) sertk::write_wav(argv[1], audio);

  const auto fm = sertk::dsp::extract_features(audio);
  const auto& names = fm.frames.column_names;
  const auto col = [&](const std::string& name) {
    return static_cast<Eigen::Index>(std::find(names.begin(), names.end(), name) - names.begin());
  };
  std::cout << fm.frames.values.rows() << " frames, " << fm.voiced_frames << " voiced, " << names.size()
            << " descriptors\n";
  for (const char* name : {"f0_hz", "F1_hz", "F2_hz", "hnr_db", "h1_h2_db"}) {
    std::vector<double> v;
    for (Eigen::Index r = 0; r < fm.frames.values.rows(); ++r)
      if (fm.frames.values(r, col("f0_hz")) > 0.0) v.push_back(fm.frames.values(r, col(name)));
    if (!v.empty()) std::cout << "  median " << name << " = " << median(v) << '\n';
  }
  if (fm.jitter_local) std::cout << "  jitter " << *fm.jitter_local << ", shimmer " << *fm.shimmer_local << '\n';
}
