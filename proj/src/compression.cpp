#include "race/compression.hpp"

#include <cmath>

#include "race/rng.hpp"

namespace race {

RaceVariant parse_variant(const std::string& name) {
  if (name == "cls-fixed") return RaceVariant::cls_fixed;
  if (name == "cls-adaptive") return RaceVariant::cls_adaptive;
  if (name == "reg-fixed") return RaceVariant::reg_fixed;
  if (name == "reg-adaptive") return RaceVariant::reg_adaptive;
  throw ContractError("unknown variant '" + name + "'");
}

std::string variant_name(RaceVariant v) {
  switch (v) {
    case RaceVariant::cls_fixed: return "cls-fixed";
    case RaceVariant::cls_adaptive: return "cls-adaptive";
    case RaceVariant::reg_fixed: return "reg-fixed";
    case RaceVariant::reg_adaptive: return "reg-adaptive";
  }
  throw ContractError("unknown variant value");
}

bool is_classification(RaceVariant v) {
  return v == RaceVariant::cls_fixed || v == RaceVariant::cls_adaptive;
}

bool is_adaptive(RaceVariant v) {
  return v == RaceVariant::cls_adaptive || v == RaceVariant::reg_adaptive;
}

int default_k(int l) {
  if (l < 1) throw ContractError("default_k: need at least one label");
  int k = static_cast<int>(std::ceil(std::log2(static_cast<double>(l))));
  return k < 1 ? 1 : k;
}

Mat init_encoder(int l, int k, std::uint64_t seed) {
  if (k < 1 || l < 1) throw ContractError("init_encoder: l and k must be positive");
  if (k > l)
    throw DimensionError("init_encoder: k=" + std::to_string(k) +
                         " exceeds l=" + std::to_string(l));
  Rng rng(seed);
  auto draw = [&](int) {
    Vec col(l);
    for (int i = 0; i < l; ++i) col(i) = rng.uniform(-1.0, 1.0);
    return col;
  };
  Mat raw(l, k);
  for (int c = 0; c < k; ++c) raw.col(c) = draw(c);
  return gram_schmidt(raw, draw);
}

Mat encode(const Mat& L, const Mat& A) {
  if (L.cols() != A.rows())
    throw DimensionError("encode: label arity " + std::to_string(L.cols()) +
                         " does not match encoder rows " + std::to_string(A.rows()));
  return L * A;
}

Mat binarize(const Mat& H) {
  return H.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : 0.0; });
}

Mat decode(const Mat& P, const Mat& beta, double threshold) {
  if (P.cols() != beta.rows())
    throw DimensionError("decode: prediction arity " + std::to_string(P.cols()) +
                         " does not match decoder rows " + std::to_string(beta.rows()));
  Mat raw = P * beta;
  return raw.unaryExpr([threshold](double v) { return v >= threshold ? 1.0 : 0.0; });
}

RaceModel::RaceModel(const RaceConfig& cfg, const FeatureSchema& schema)
    : cfg_(cfg), schema_(schema) {
  if (cfg_.l < 1) throw ContractError("race: label count must be positive");
  if (cfg_.k <= 0) cfg_.k = default_k(cfg_.l);
  if (cfg_.k > cfg_.l) throw DimensionError("race: k exceeds l");
  auto mode = is_classification(cfg_.variant) ? LearnerMode::classification
                                              : LearnerMode::regression;
  br_ = BinaryRelevance(mode, schema_, cfg_.k, cfg_.sgd_lr);
}

Mat RaceModel::pseudo_labels(const Mat& L) const {
  Mat H = encode(L, A_);
  return is_classification(cfg_.variant) ? binarize(H) : H;
}

// the decoder is fitted against +/-1 labels so that the zero threshold of
// decode() sits between the two states instead of below both of them
Mat RaceModel::signed_labels(const Mat& L) {
  return (2.0 * L).array() - 1.0;
}

void RaceModel::init(const Mat& X, const Mat& L) {
  if (ready_) throw ContractError("race: init called twice");
  if (X.rows() != L.rows()) throw DimensionError("race: X and L row counts differ");
  if (X.rows() < 1) throw ContractError("race: first batch is empty");
  if (static_cast<int>(L.cols()) != cfg_.l)
    throw DimensionError("race: label arity does not match config");
  require_binary(L, "label matrix");

  A_ = init_encoder(cfg_.l, cfg_.k, cfg_.seed);
  Mat H = pseudo_labels(L);
  br_.update(X, H);
  rls_ = batch_least_squares(H, signed_labels(L), cfg_.ridge);
  batches_ = 1;
  ready_ = true;
}

Mat RaceModel::predict(const Mat& X) const {
  if (!ready_) throw ContractError("race: predict before init");
  if (X.rows() == 0) return Mat(0, cfg_.l);
  Mat P = br_.predict(X);
  return decode(P, rls_.beta, cfg_.decode_threshold);
}

void RaceModel::adapt_encoder() {
  if (!is_adaptive(cfg_.variant))
    throw ContractError("race: encoder adaptation requested on a fixed variant");
  A_ = rls_.beta.transpose();
}

void RaceModel::train(const Mat& X, const Mat& L) {
  if (!ready_) throw ContractError("race: train before init");
  if (X.rows() != L.rows()) throw DimensionError("race: X and L row counts differ");
  if (X.rows() == 0) return;
  if (static_cast<int>(L.cols()) != cfg_.l)
    throw DimensionError("race: label arity does not match config");
  require_binary(L, "label matrix");

  if (is_adaptive(cfg_.variant)) adapt_encoder();
  Mat H = pseudo_labels(L);
  br_.update(X, H);
  rls_update(rls_, H, signed_labels(L));
  ++batches_;
}


}  // namespace race
