#pragma once

#include <cstdint>
#include <string>

#include "race/learners.hpp"
#include "race/linalg.hpp"
#include "race/stream.hpp"

namespace race {

enum class RaceVariant { cls_fixed, cls_adaptive, reg_fixed, reg_adaptive };

RaceVariant parse_variant(const std::string& name);
std::string variant_name(RaceVariant v);
bool is_classification(RaceVariant v);
bool is_adaptive(RaceVariant v);

// ceil(log2 l), never below 1
int default_k(int l);

struct RaceConfig {
  int l = 0;
  int k = 0;  // <= 0 means default_k(l)
  RaceVariant variant = RaceVariant::cls_fixed;
  std::uint64_t seed = 1;
  double ridge = 1e-6;
  double decode_threshold = 0.0;
  double sgd_lr = 1e-4;
};

// random orthonormal label-space projection, entries drawn uniform on [-1,1]
// column by column before orthogonalization
Mat init_encoder(int l, int k, std::uint64_t seed);

// pseudo labels H = L A
Mat encode(const Mat& L, const Mat& A);

// entry >= 0 maps to 1
Mat binarize(const Mat& H);

// labels switch on where the decoded row P beta clears the threshold
Mat decode(const Mat& P, const Mat& beta, double threshold = 0.0);

class RaceModel final : public StreamMethod {
 public:
  RaceModel(const RaceConfig& cfg, const FeatureSchema& schema);

  // consumes the first batch: draws the encoder, trains the per-pseudo-label
  // learners once, and fits the initial decoder
  void init(const Mat& X, const Mat& L) override;

  // the two halves of process_batch, split so a harness can score between
  // them and can re-present a batch several times
  Mat predict(const Mat& X) const override;
  void train(const Mat& X, const Mat& L) override;

  // swaps the encoder for the transposed decoder; only adaptive variants may
  void adapt_encoder();

  const Mat& encoder() const { return A_; }
  const RlsState& decoder() const { return rls_; }
  const RaceConfig& config() const { return cfg_; }
  long batches_seen() const { return batches_; }
  bool ready() const { return ready_; }

 private:
  Mat pseudo_labels(const Mat& L) const;
  static Mat signed_labels(const Mat& L);

  RaceConfig cfg_;
  FeatureSchema schema_;
  Mat A_;
  RlsState rls_;
  BinaryRelevance br_;
  long batches_ = 0;
  bool ready_ = false;
};

}  // namespace race
