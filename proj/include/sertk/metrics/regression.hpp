#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sertk/error.hpp"

namespace sertk::metrics {

namespace detail {

inline void check_pair(std::span<const double> pred, std::span<const double> target, std::size_t min_len,
                       const char* what) {
  require(pred.size() == target.size(), std::string(what) + ": length mismatch");
  require(pred.size() >= min_len, std::string(what) + ": need at least " + std::to_string(min_len) + " values");
  for (std::size_t i = 0; i < pred.size(); ++i)
    require(std::isfinite(pred[i]) && std::isfinite(target[i]), std::string(what) + ": non-finite value");
}

struct Moments {
  double mean_p = 0.0, mean_t = 0.0, var_p = 0.0, var_t = 0.0, cov = 0.0;
};

// Population moments (divide by n), or sample moments (n - 1) on request.
inline Moments moments(std::span<const double> p, std::span<const double> t, bool sample) {
  Moments m;
  const auto n = static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    m.mean_p += p[i];
    m.mean_t += t[i];
  }
  m.mean_p /= n;
  m.mean_t /= n;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dp = p[i] - m.mean_p, dt = t[i] - m.mean_t;
    m.var_p += dp * dp;
    m.var_t += dt * dt;
    m.cov += dp * dt;
  }
  const double denom = sample ? n - 1.0 : n;
  m.var_p /= denom;
  m.var_t /= denom;
  m.cov /= denom;
  return m;
}

}  // namespace detail

inline double mse(std::span<const double> pred, std::span<const double> target) {
  detail::check_pair(pred, target, 1, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (target[i] - pred[i]) * (target[i] - pred[i]);
  return s / static_cast<double>(pred.size());
}

inline double mae(std::span<const double> pred, std::span<const double> target) {
  detail::check_pair(pred, target, 1, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(target[i] - pred[i]);
  return s / static_cast<double>(pred.size());
}

inline double pcc(std::span<const double> pred, std::span<const double> target) {
  detail::check_pair(pred, target, 2, "pcc");
  const auto m = detail::moments(pred, target, false);
  require(m.var_p > 0.0 && m.var_t > 0.0, "pcc: zero variance");
  return m.cov / std::sqrt(m.var_p * m.var_t);
}

// 2 rho s_t s_p / (s_t^2 + s_p^2 + (mu_t - mu_p)^2). Population variances by
// default; `sample_variance` switches covariance and variances to n - 1.
inline double ccc(std::span<const double> pred, std::span<const double> target, bool sample_variance = false) {
  detail::check_pair(pred, target, 2, "ccc");
  const auto m = detail::moments(pred, target, sample_variance);
  require(m.var_p > 0.0 && m.var_t > 0.0, "ccc: zero variance");
  const double d = m.mean_t - m.mean_p;
  return 2.0 * m.cov / (m.var_t + m.var_p + d * d);
}

enum class AccMode { kAcc2, kAcc7 };

inline AccMode parse_acc_mode(std::string_view s) {
  if (s == "acc2") return AccMode::kAcc2;
  if (s == "acc7") return AccMode::kAcc7;
  throw InputError("unknown accuracy mode '" + std::string(s) + "' (expected acc2|acc7)");
}

// acc7: both scores rounded half away from zero onto -3..3, exact match.
// acc2: sign agreement (positive vs negative); pairs whose target is 0 are
// dropped from both sequences.
inline double acc_from_scores(std::span<const double> pred, std::span<const double> target, AccMode mode) {
  detail::check_pair(pred, target, 1, "acc_from_scores");
  std::size_t hits = 0, used = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mode == AccMode::kAcc7) {
      require(pred[i] >= -3.0 && pred[i] <= 3.0 && target[i] >= -3.0 && target[i] <= 3.0,
              "acc7: scores must lie in [-3, 3]");
      hits += std::round(pred[i]) == std::round(target[i]) ? 1 : 0;
      ++used;
    } else {
      if (target[i] == 0.0) continue;
      hits += (pred[i] > 0.0) == (target[i] > 0.0) ? 1 : 0;
      ++used;
    }
  }
  require(used > 0, "acc2: no pairs left after excluding zero targets");
  return static_cast<double>(hits) / static_cast<double>(used);
}

}  // namespace sertk::metrics
