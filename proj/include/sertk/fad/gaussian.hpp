#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sertk/error.hpp"
#include "sertk/matrix.hpp"

namespace sertk::fad {

struct GaussianStats {
  Vec mean;
  Mat covariance;
  std::size_t n = 0;

  Eigen::Index dim() const { return mean.size(); }
};

// Column means and population covariance, optionally shrunk toward its
// diagonal: (1 - shrinkage) * S + shrinkage * diag(S).
inline GaussianStats fit_gaussian(const Mat& x, double shrinkage = 0.0) {
  require(x.rows() >= 2, "fit_gaussian: need at least 2 rows, got " + std::to_string(x.rows()));
  require(x.cols() >= 1, "fit_gaussian: no columns");
  require(x.allFinite(), "fit_gaussian: non-finite entry");
  require(shrinkage >= 0.0 && shrinkage <= 1.0, "fit_gaussian: shrinkage must lie in [0, 1]");
  GaussianStats g;
  g.n = static_cast<std::size_t>(x.rows());
  g.mean = x.colwise().mean().transpose();
  const Mat centered = x.rowwise() - g.mean.transpose();
  Mat cov = (centered.transpose() * centered) / static_cast<double>(x.rows());
  if (shrinkage > 0.0) {
    const Mat diag = cov.diagonal().asDiagonal();
    cov = (1.0 - shrinkage) * cov + shrinkage * diag;
  }
  g.covariance = 0.5 * (cov + cov.transpose());
  return g;
}

inline GaussianStats make_gaussian(Vec mean, Mat covariance, std::size_t n = 2) {
  require(covariance.rows() == mean.size() && covariance.cols() == mean.size(),
          "gaussian: covariance shape does not match mean");
  require(mean.allFinite() && covariance.allFinite(), "gaussian: non-finite parameters");
  return {std::move(mean), 0.5 * (covariance + covariance.transpose()), n};
}

namespace detail {

constexpr double kEigenClip = 1e-10;
constexpr double kCorruptEigen = -1e-6;

// Symmetric PSD square root, eigenvalues below the clip set to zero.
inline Mat psd_sqrt(const Mat& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
  ensure(es.info() == Eigen::Success, std::string(what) + ": eigendecomposition failed");
  Vec ev = es.eigenvalues();
  require(ev.minCoeff() >= kCorruptEigen, std::string(what) + ": covariance has a negative eigenvalue");
  for (auto& v : ev) v = v < kEigenClip ? 0.0 : std::sqrt(v);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// ||mu_a - mu_b||^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2), clipped at 0.
inline double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  require(a.dim() == b.dim(), "frechet_distance: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                  std::to_string(b.dim()) + ")");
  require(a.dim() > 0, "frechet_distance: empty statistics");
  const Mat sqrt_a = detail::psd_sqrt(a.covariance, "frechet_distance");
  Mat m = sqrt_a * b.covariance * sqrt_a;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  ensure(es.info() == Eigen::Success, "frechet_distance: eigendecomposition failed");
  {
    Eigen::SelfAdjointEigenSolver<Mat> eb(0.5 * (b.covariance + b.covariance.transpose()), Eigen::EigenvaluesOnly);
    require(eb.eigenvalues().minCoeff() >= detail::kCorruptEigen,
            "frechet_distance: covariance has a negative eigenvalue");
  }
  double tr_sqrt = 0.0;
  for (const double v : es.eigenvalues())
    if (v >= detail::kEigenClip) tr_sqrt += std::sqrt(v);
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double d = mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, d);
}

}  // namespace sertk::fad
