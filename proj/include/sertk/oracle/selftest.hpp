#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sertk/asr/align.hpp"
#include "sertk/fad/gaussian.hpp"
#include "sertk/metrics/classification.hpp"
#include "sertk/metrics/regression.hpp"
#include "sertk/oracle/oracles.hpp"
#include "sertk/probe/cca.hpp"
#include "sertk/semisl/classifier.hpp"

namespace sertk::oracle {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

namespace detail {

template <typename Fn>
CheckResult timed(std::string name, double limit, Fn&& body) {
  CheckResult r;
  r.name = std::move(name);
  r.time_limit = limit;
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  r.passed = body(detail);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds >= limit) {
    r.passed = false;
    detail << " time " << r.seconds << "s over limit " << limit << "s";
  }
  r.detail = detail.str();
  return r;
}

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline Mat random_orthogonal(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, n, n));
  return qr.householderQ();
}

inline Mat random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Mat a = random_matrix(rng, n, n);
  return a * a.transpose() / static_cast<double>(n) + 0.1 * Mat::Identity(n, n);
}

}  // namespace detail

// DP edit distance against exhaustive recursion on short random sequences.
inline CheckResult check_edit_distance(std::uint64_t seed = 1, std::size_t cases = 1000) {
  return detail::timed("edit-distance oracle", 5.0, [&](std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(0, 8), sym(0, 3);
    const std::vector<std::string> vocab{"a", "b", "c", "d"};
    std::size_t mismatches = 0;
    for (std::size_t c = 0; c < cases; ++c) {
      Tokens ref(static_cast<std::size_t>(len(rng))), hyp(static_cast<std::size_t>(len(rng)));
      for (auto& t : ref) t = vocab[static_cast<std::size_t>(sym(rng))];
      for (auto& t : hyp) t = vocab[static_cast<std::size_t>(sym(rng))];
      const auto a = asr::align(ref, hyp);
      const bool counts_ok = a.matches + a.substitutions + a.deletions == ref.size() &&
                             a.matches + a.substitutions + a.insertions == hyp.size();
      if (!counts_ok || a.errors() != brute_force_edit_distance(ref, hyp)) ++mismatches;
    }
    out << cases << " pairs, " << mismatches << " mismatches";
    return mismatches == 0;
  });
}

// Frechet distance against closed forms plus identity, symmetry and
// rotation invariance.
inline CheckResult check_fad_closed_forms(std::uint64_t seed = 2, std::size_t cases = 200) {
  return detail::timed("fad closed forms", 2.0, [&](std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean(-3.0, 3.0), var(0.1, 4.0);
    std::uniform_int_distribution<int> dim(1, 8);
    double closed = 0.0, ident = 0.0, sym = 0.0, rot = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
      const Eigen::Index d = c % 2 == 0 ? 1 : dim(rng);
      Vec ma(d), mb(d), va(d), vb(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        ma(i) = mean(rng);
        mb(i) = mean(rng);
        va(i) = var(rng);
        vb(i) = var(rng);
      }
      const auto ga = fad::make_gaussian(ma, va.asDiagonal().toDenseMatrix());
      const auto gb = fad::make_gaussian(mb, vb.asDiagonal().toDenseMatrix());
      closed = std::max(closed, std::abs(fad::frechet_distance(ga, gb) - frechet_diagonal(ma, va, mb, vb)));

      const auto fa = fad::make_gaussian(ma, detail::random_spd(rng, d));
      const auto fb = fad::make_gaussian(mb, detail::random_spd(rng, d));
      ident = std::max(ident, fad::frechet_distance(fa, fa));
      const double ab = fad::frechet_distance(fa, fb);
      sym = std::max(sym, std::abs(ab - fad::frechet_distance(fb, fa)));
      const Mat q = detail::random_orthogonal(rng, d);
      const auto ra = fad::make_gaussian(q * fa.mean, q * fa.covariance * q.transpose());
      const auto rb = fad::make_gaussian(q * fb.mean, q * fb.covariance * q.transpose());
      rot = std::max(rot, std::abs(fad::frechet_distance(ra, rb) - ab));
    }
    out << "closed-form " << closed << ", identity " << ident << ", symmetry " << sym << ", rotation " << rot;
    return closed <= 1e-9 && ident <= 1e-8 && sym <= 1e-8 && rot <= 1e-6;
  });
}

// Self-similarity, affine invariance, and the SVD route against the
// generalized-eigenvalue formulation.
inline CheckResult check_cca(std::uint64_t seed = 3) {
  return detail::timed("cca identities", 10.0, [&](std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(1, 4);
    double self = 0.0, affine = 0.0, oracle = 0.0;
    {
      const Mat x = detail::random_matrix(rng, 200, 6);
      for (double c : probe::cca(x, x).correlations) self = std::max(self, std::abs(c - 1.0));
    }
    for (int t = 0; t < 50; ++t) {
      const Mat x = detail::random_matrix(rng, 120, 5);
      const Mat y = x.leftCols(3) * detail::random_matrix(rng, 3, 4) + detail::random_matrix(rng, 120, 4);
      const Mat a = detail::random_matrix(rng, 5, 5) + 3.0 * Mat::Identity(5, 5);
      const Eigen::RowVectorXd b = detail::random_matrix(rng, 1, 5);
      const Mat xt = (x * a).rowwise() + b;
      const auto r0 = probe::cca(x, y).correlations;
      const auto r1 = probe::cca(xt, y).correlations;
      for (std::size_t i = 0; i < r0.size(); ++i) affine = std::max(affine, std::abs(r0[i] - r1[i]));
    }
    for (int t = 0; t < 100; ++t) {
      const Eigen::Index p = small(rng), q = small(rng);
      const Mat x = detail::random_matrix(rng, 60, p);
      const Mat y = 0.7 * x.leftCols(1).replicate(1, q) + detail::random_matrix(rng, 60, q);
      const auto svd_route = probe::cca(x, y).correlations;
      const auto eig_route = cca_generalized_eigen(x, y);
      for (std::size_t i = 0; i < svd_route.size(); ++i)
        oracle = std::max(oracle, std::abs(svd_route[i] - eig_route[i]));
    }
    out << "self " << self << ", affine " << affine << ", oracle " << oracle;
    return self <= 1e-6 && affine <= 1e-5 && oracle <= 1e-8;
  });
}

// Accuracy identity, a closed-form CCC case, and the classifier gradient.
inline CheckResult check_metrics(std::uint64_t seed = 4) {
  return detail::timed("metrics identities", 10.0, [&](std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> classes(2, 8), count(0, 50);
    std::size_t wa_mismatch = 0;
    for (int t = 0; t < 500; ++t) {
      const int k = classes(rng);
      std::vector<std::string> names;
      for (int c = 0; c < k; ++c) names.push_back(std::to_string(c));
      metrics::ConfusionCounts cm(names);
      for (auto& row : cm.counts)
        for (auto& v : row) v = static_cast<std::size_t>(count(rng));
      if (cm.total() == 0) cm.counts[0][0] = 1;
      if (metrics::weighted_accuracy_paper(cm) != metrics::unweighted_accuracy(cm)) ++wa_mismatch;
    }

    std::vector<double> target(101), pred(101);
    for (std::size_t i = 0; i < target.size(); ++i) {
      target[i] = static_cast<double>(i) - 50.0;
      pred[i] = 2.0 * target[i];
    }
    const double ccc_err = std::abs(metrics::ccc(pred, target) - 0.8);

    double grad_err = 0.0;
    std::uniform_int_distribution<int> label(0, 2);
    for (int t = 0; t < 20; ++t) {
      const Mat xb = semisl::with_bias(detail::random_matrix(rng, 5, 3));
      std::vector<int> y(5);
      for (auto& v : y) v = label(rng);
      const Mat w = 0.5 * detail::random_matrix(rng, 4, 3);
      const double l2 = 1e-2;
      const auto [loss, grad] = semisl::loss_and_gradient(xb, y, w, l2);
      const auto f = [&](const Mat& wp) { return semisl::loss_and_gradient(xb, y, wp, l2).first; };
      grad_err = std::max(grad_err, gradient_check(f, w, grad));
    }
    out << "WA/UA mismatches " << wa_mismatch << ", CCC error " << ccc_err << ", gradient rel error " << grad_err;
    return wa_mismatch == 0 && ccc_err <= 1e-9 && grad_err < 1e-4;
  });
}

inline std::vector<CheckResult> run_selftest() {
  return {check_edit_distance(), check_fad_closed_forms(), check_cca(), check_metrics()};
}

}  // namespace sertk::oracle
