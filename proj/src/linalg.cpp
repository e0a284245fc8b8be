#include "race/linalg.hpp"

#include <algorithm>
#include <string>

namespace race {

namespace {
constexpr double kCollapseTol = 1e-12;
constexpr int kMaxRedraws = 100;

// one Woodbury correction for a slice of rows
void woodbury_step(RlsState& state, const Mat& H, const Mat& T) {
  const Eigen::Index n = H.rows();
  Mat S = Mat::Identity(n, n) + H * state.K * H.transpose();
  Eigen::FullPivLU<Mat> lu(S);
  if (!lu.isInvertible())
    throw SingularMatrixError("rls_update: I + H K H^T is singular");

  Mat W = lu.solve(H * state.K);
  state.K -= state.K * H.transpose() * W;
  state.K = ((state.K + state.K.transpose()) / 2.0).eval();
  state.beta += state.K * H.transpose() * (T - H * state.beta);
  state.seen += n;
}
}  // namespace

Mat gram_schmidt(const Mat& columns, const ColumnSource& regen) {
  const Eigen::Index rows = columns.rows();
  const Eigen::Index k = columns.cols();
  if (k > rows)
    throw DimensionError("gram_schmidt: more columns than rows (" +
                         std::to_string(k) + " > " + std::to_string(rows) + ")");
  require_finite(columns, "gram_schmidt input");

  Mat q(rows, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Vec raw = columns.col(i);
    int attempts = 0;
    for (;;) {
      Vec v = raw;
      for (Eigen::Index j = 0; j < i; ++j) v -= q.col(j).dot(raw) * q.col(j);
      double norm = v.norm();
      if (norm >= kCollapseTol) {
        q.col(i) = v / norm;
        break;
      }
      if (!regen)
        throw DegeneracyError("gram_schmidt: column " + std::to_string(i) +
                              " collapsed and no redraw source given");
      if (++attempts > kMaxRedraws)
        throw DegeneracyError("gram_schmidt: column " + std::to_string(i) +
                              " still degenerate after redraws");
      raw = regen(static_cast<int>(i));
    }
  }
  return q;
}

RlsState batch_least_squares(const Mat& H, const Mat& T, double ridge) {
  if (H.rows() != T.rows())
    throw DimensionError("batch_least_squares: row counts differ");
  if (H.rows() < 1) throw ContractError("batch_least_squares: empty batch");
  if (ridge < 0) throw ContractError("batch_least_squares: negative ridge");
  require_finite(H, "design matrix");
  require_finite(T, "target matrix");

  const Eigen::Index k = H.cols();
  Mat gram = H.transpose() * H + ridge * Mat::Identity(k, k);
  Eigen::FullPivLU<Mat> lu(gram);
  if (!lu.isInvertible())
    throw SingularMatrixError("batch_least_squares: H^T H is singular (ridge=" +
                              std::to_string(ridge) + ")");
  RlsState s;
  s.K = lu.inverse();
  s.beta = s.K * (H.transpose() * T);
  s.seen = H.rows();
  return s;
}

void rls_update(RlsState& state, const Mat& H_new, const Mat& T_new) {
  if (H_new.rows() != T_new.rows())
    throw DimensionError("rls_update: row counts differ");
  if (H_new.cols() != state.K.cols())
    throw DimensionError("rls_update: design width does not match state");
  if (T_new.cols() != state.beta.cols())
    throw DimensionError("rls_update: target width does not match state");
  if (H_new.rows() < 1) throw ContractError("rls_update: empty batch");
  require_finite(H_new, "design matrix");
  require_finite(T_new, "target matrix");

  // Updating is exact under any row split, so work through the batch in
  // slices near the design width: the matrix that gets inverted then stays
  // k-sized instead of growing with the batch.
  const Eigen::Index n = H_new.rows();
  const Eigen::Index chunk = std::max<Eigen::Index>(state.K.cols(), 8);
  for (Eigen::Index start = 0; start < n; start += chunk) {
    const Eigen::Index rows = std::min(chunk, n - start);
    woodbury_step(state, H_new.middleRows(start, rows),
                  T_new.middleRows(start, rows));
  }
  require_finite(state.K, "updated inverse Gram matrix");
  require_finite(state.beta, "updated decoder");
}

}  // namespace race
