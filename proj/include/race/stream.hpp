#pragma once

#include "race/matrix.hpp"

namespace race {

// the test-then-train surface every method exposes to the harness:
// batch 0 goes to init, later batches are predicted on before training
class StreamMethod {
 public:
  virtual ~StreamMethod() = default;
  virtual void init(const Mat& X, const Mat& L) = 0;
  virtual Mat predict(const Mat& X) const = 0;
  virtual void train(const Mat& X, const Mat& L) = 0;

  Mat process_batch(const Mat& X, const Mat& L) {
    Mat y = predict(X);
    train(X, L);
    return y;
  }
};

}  // namespace race
