#include "race/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "race/rng.hpp"

namespace race {

ObrModel::ObrModel(const FeatureSchema& schema, int l)
    : br_(LearnerMode::classification, schema, l) {}

void ObrModel::init(const Mat& X, const Mat& L) {
  train(X, L);
  ready_ = true;
}

Mat ObrModel::predict(const Mat& X) const {
  if (!ready_) throw ContractError("obr: predict before init");
  return br_.predict(X);
}

void ObrModel::train(const Mat& X, const Mat& L) {
  require_binary(L, "label matrix");
  br_.update(X, L);
  ready_ = true;
}

OeccModel::OeccModel(const FeatureSchema& schema, int l, std::uint64_t seed, int ensemble)
    : m_(static_cast<int>(schema.size())), l_(l) {
  if (l < 1) throw ContractError("oecc: need at least one label");
  if (ensemble < 1) throw ContractError("oecc: ensemble must be positive");
  Rng rng(seed);
  chains_.resize(ensemble);
  for (auto& chain : chains_) {
    chain.order.resize(l);
    std::iota(chain.order.begin(), chain.order.end(), 0);
    rng.shuffle(chain.order);
    FeatureSchema link_schema = schema;
    chain.links.reserve(l);
    for (int j = 0; j < l; ++j) {
      chain.links.emplace_back(link_schema);
      link_schema.push_back({FeatureKind::nominal, 2});  // the label just chained
    }
  }
}

void OeccModel::init(const Mat& X, const Mat& L) { train(X, L); }

Mat OeccModel::predict(const Mat& X) const {
  if (!ready_) throw ContractError("oecc: predict before init");
  if (static_cast<int>(X.cols()) != m_) throw DimensionError("oecc: feature arity mismatch");
  Mat votes = Mat::Zero(X.rows(), l_);
  std::vector<double> aug(m_ + l_);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (const auto& chain : chains_) {
      std::copy(X.row(i).data(), X.row(i).data() + m_, aug.begin());
      for (int j = 0; j < l_; ++j) {
        int hard = chain.links[j].predict(aug.data(), m_ + j).first;
        votes(i, chain.order[j]) += hard;
        aug[m_ + j] = hard;  // this chain's own guess feeds the next link
      }
    }
  }
  double n = static_cast<double>(chains_.size());
  return votes.unaryExpr([n](double v) { return v / n >= 0.5 ? 1.0 : 0.0; });
}

void OeccModel::train(const Mat& X, const Mat& L) {
  if (X.rows() != L.rows()) throw DimensionError("oecc: X and L row counts differ");
  if (static_cast<int>(X.cols()) != m_) throw DimensionError("oecc: feature arity mismatch");
  if (static_cast<int>(L.cols()) != l_) throw DimensionError("oecc: label arity mismatch");
  require_binary(L, "label matrix");
  std::vector<double> aug(m_ + l_);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (auto& chain : chains_) {
      std::copy(X.row(i).data(), X.row(i).data() + m_, aug.begin());
      for (int j = 0; j < l_; ++j) {
        double truth = L(i, chain.order[j]);
        chain.links[j].update(aug.data(), m_ + j, static_cast<int>(truth));
        aug[m_ + j] = truth;  // later links train on the true history
      }
    }
  }
  ready_ = true;
}

MajorityModel::MajorityModel(int l) : counts_(l, 0) {
  if (l < 1) throw ContractError("majority: need at least one label");
}

void MajorityModel::absorb(const Mat& L) {
  if (static_cast<int>(L.cols()) != static_cast<int>(counts_.size()))
    throw DimensionError("majority: label arity mismatch");
  require_binary(L, "label matrix");
  if (L.rows() == 0) return;
  double total = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
      counts_[j] += L(i, j) != 0.0;
      total += L(i, j);
    }
  c_ = total / static_cast<double>(L.rows());
  seen_any_ = true;
}

void MajorityModel::init(const Mat&, const Mat& L) { absorb(L); }

void MajorityModel::train(const Mat&, const Mat& L) { absorb(L); }

Mat MajorityModel::predict(const Mat& X) const {
  const int l = static_cast<int>(counts_.size());
  Mat y = Mat::Zero(X.rows(), l);
  if (!seen_any_) return y;  // nothing absorbed yet: all negative
  int top = std::min(static_cast<int>(std::floor(c_)), l);
  if (top < 1) return y;

  std::vector<int> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts_[a] > counts_[b]; });
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (int r = 0; r < top; ++r) y(i, order[r]) = 1.0;
  return y;
}

}  // namespace race
