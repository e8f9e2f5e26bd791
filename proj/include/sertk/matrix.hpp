#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "sertk/error.hpp"

namespace sertk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Dense real matrix with optional column names. Rows are observations
// (frames, utterances, embeddings); columns are dimensions.
struct Matrix {
  Mat values;
  std::vector<std::string> column_names;

  Matrix() = default;
  explicit Matrix(Mat v, std::vector<std::string> names = {})
      : values(std::move(v)), column_names(std::move(names)) {
    validate();
  }

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  void validate() const {
    require(column_names.empty() ||
                column_names.size() == static_cast<std::size_t>(values.cols()),
            "column name count does not match column count");
    require(values.allFinite(), "matrix contains non-finite values");
  }
};

// Stack matrices with equal column counts vertically.
inline Mat vstack(const std::vector<Mat>& parts) {
  if (parts.empty()) return {};
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front().cols();
  for (const auto& p : parts) {
    require(p.cols() == cols, "vstack: column count mismatch");
    rows += p.rows();
  }
  Mat out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  return out;
}

}  // namespace sertk
