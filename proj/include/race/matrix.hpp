#pragma once

#include <Eigen/Dense>

#include "race/errors.hpp"

namespace race {

// rows are streamed instance-by-instance everywhere, so keep storage row-major
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

inline void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + " has non-finite entries");
}

inline void require_binary(const Mat& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      if (v != 0.0 && v != 1.0)
        throw ContractError(std::string(what) + " must be a 0/1 matrix");
    }
}

}  // namespace race
