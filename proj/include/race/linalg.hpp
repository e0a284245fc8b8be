#pragma once

#include <functional>

#include "race/matrix.hpp"

namespace race {

// decoder state kept across batches: K = (H^T H + ridge I)^-1 and beta = K H^T T
struct RlsState {
  Mat K;
  Mat beta;
  long seen = 0;
};

// delivers a replacement raw column when one collapses during orthogonalization
using ColumnSource = std::function<Vec(int col)>;

// classical Gram-Schmidt over the columns of a (rows x k) matrix.
// A column whose residual norm drops below 1e-12 is redrawn through `regen`;
// without a regen source that situation is an error.
Mat gram_schmidt(const Mat& columns, const ColumnSource& regen = nullptr);

// one-shot ridge least squares of targets T on design H
RlsState batch_least_squares(const Mat& H, const Mat& T, double ridge = 1e-6);

// absorbs one more batch into the decoder without refitting from scratch
void rls_update(RlsState& state, const Mat& H_new, const Mat& T_new);

}  // namespace race
