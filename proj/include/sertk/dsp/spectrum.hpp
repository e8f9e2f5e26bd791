#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

#include "sertk/matrix.hpp"

namespace sertk::dsp {

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// One-sided power spectrum |X_k|^2, k = 0..fft_size/2, of a zero-padded frame.
inline Vec power_spectrum(const Eigen::Ref<const Vec>& frame, int fft_size) {
  std::vector<double> in(fft_size, 0.0);
  for (Eigen::Index i = 0; i < frame.size() && i < fft_size; ++i) in[i] = frame(i);
  std::vector<std::complex<double>> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  Vec p(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) p(k) = std::norm(out[k]);
  return p;
}

// Power spectra of every row; rows of the result are frames.
inline Mat power_spectra(const Mat& frames, int fft_size) {
  Mat out(frames.rows(), fft_size / 2 + 1);
  for (Eigen::Index i = 0; i < frames.rows(); ++i)
    out.row(i) = power_spectrum(frames.row(i).transpose(), fft_size).transpose();
  return out;
}

}  // namespace sertk::dsp
