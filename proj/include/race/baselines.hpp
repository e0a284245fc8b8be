#pragma once

#include <cstdint>
#include <vector>

#include "race/learners.hpp"
#include "race/stream.hpp"

namespace race {

// independent naive Bayes stream per original label
class ObrModel final : public StreamMethod {
 public:
  ObrModel(const FeatureSchema& schema, int l);
  void init(const Mat& X, const Mat& L) override;
  Mat predict(const Mat& X) const override;
  void train(const Mat& X, const Mat& L) override;

 private:
  BinaryRelevance br_;
  bool ready_ = false;
};

// ensemble of classifier chains: each link sees the original features plus
// the labels of the links before it (its own hard guesses at test time, the
// true values at training time); a label fires when the chain vote averages
// at least one half
class OeccModel final : public StreamMethod {
 public:
  OeccModel(const FeatureSchema& schema, int l, std::uint64_t seed, int ensemble = 5);
  void init(const Mat& X, const Mat& L) override;
  Mat predict(const Mat& X) const override;
  void train(const Mat& X, const Mat& L) override;

  const std::vector<int>& chain_order(int chain) const { return chains_[chain].order; }

 private:
  struct Chain {
    std::vector<int> order;
    std::vector<NaiveBayes> links;
  };
  int m_ = 0;
  int l_ = 0;
  std::vector<Chain> chains_;
  bool ready_ = false;
};

// predicts the globally most frequent labels, as many as the floor of the
// previous batch's label cardinality
class MajorityModel final : public StreamMethod {
 public:
  explicit MajorityModel(int l);
  void init(const Mat& X, const Mat& L) override;
  Mat predict(const Mat& X) const override;
  void train(const Mat& X, const Mat& L) override;

  double cardinality() const { return c_; }

 private:
  void absorb(const Mat& L);
  std::vector<long> counts_;
  double c_ = 0.0;
  bool seen_any_ = false;
};

// the all-zeros straw man
class NegativeModel final : public StreamMethod {
 public:
  explicit NegativeModel(int l) : l_(l) {}
  void init(const Mat&, const Mat&) override {}
  Mat predict(const Mat& X) const override { return Mat::Zero(X.rows(), l_); }
  void train(const Mat&, const Mat&) override {}

 private:
  int l_;
};

}  // namespace race
