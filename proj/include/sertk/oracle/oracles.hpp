#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"

// Slow, obviously-correct reference implementations used to cross-check the
// production code paths.
namespace sertk::oracle {

// Minimum edit distance by plain recursion over the three edit choices.
template <typename T>
std::size_t brute_force_edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t sub = brute_force_edit_distance(a.subspan(1), b.subspan(1)) + (a[0] == b[0] ? 0 : 1);
  const std::size_t del = brute_force_edit_distance(a.subspan(1), b) + 1;
  const std::size_t ins = brute_force_edit_distance(a, b.subspan(1)) + 1;
  return std::min({sub, del, ins});
}

template <typename T>
std::size_t brute_force_edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  return brute_force_edit_distance(std::span<const T>(a), std::span<const T>(b));
}

// Frechet distance between 1-D Gaussians: (mu_a - mu_b)^2 + (s_a - s_b)^2.
inline double frechet_1d(double mu_a, double var_a, double mu_b, double var_b) {
  const double ds = std::sqrt(var_a) - std::sqrt(var_b);
  return (mu_a - mu_b) * (mu_a - mu_b) + ds * ds;
}

// Diagonal covariances separate into a sum of 1-D terms.
inline double frechet_diagonal(const Vec& mu_a, const Vec& var_a, const Vec& mu_b, const Vec& var_b) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < mu_a.size(); ++i) d += frechet_1d(mu_a(i), var_a(i), mu_b(i), var_b(i));
  return d;
}

// Canonical correlations as square roots of the eigenvalues of
// Sxx^-1 Sxy Syy^-1 Syx, sorted descending, truncated to min(p, q).
inline std::vector<double> cca_generalized_eigen(const Mat& x, const Mat& y) {
  require(x.rows() == y.rows() && x.rows() >= 2, "cca oracle: row mismatch");
  const Mat xc = x.rowwise() - x.colwise().mean();
  const Mat yc = y.rowwise() - y.colwise().mean();
  const double n1 = static_cast<double>(x.rows() - 1);
  const Mat sxx = xc.transpose() * xc / n1;
  const Mat syy = yc.transpose() * yc / n1;
  const Mat sxy = xc.transpose() * yc / n1;
  const Mat m = sxx.fullPivLu().solve(sxy) * syy.fullPivLu().solve(sxy.transpose());
  Eigen::EigenSolver<Mat> es(m, false);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(std::sqrt(std::clamp(es.eigenvalues()(i).real(), 0.0, 1.0)));
  std::sort(out.begin(), out.end(), std::greater<>());
  out.resize(static_cast<std::size_t>(std::min(x.cols(), y.cols())));
  return out;
}

// Largest relative error between an analytic gradient and central
// differences of f at w. Relative to max(|analytic|, |numeric|, 1e-8).
inline double gradient_check(const std::function<double(const Mat&)>& f, const Mat& w, const Mat& analytic,
                             double h = 1e-5) {
  require(analytic.rows() == w.rows() && analytic.cols() == w.cols(), "gradient check: shape mismatch");
  double worst = 0.0;
  Mat probe = w;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double orig = probe(i, j);
      probe(i, j) = orig + h;
      const double up = f(probe);
      probe(i, j) = orig - h;
      const double down = f(probe);
      probe(i, j) = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(analytic(i, j)), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic(i, j) - numeric) / scale);
    }
  }
  return worst;
}

}  // namespace sertk::oracle
