#include "race/learners.hpp"

#include <cmath>

namespace race {

namespace {
constexpr double kVarianceFloor = 1e-9;
constexpr double kLog2Pi = 1.8378770664093453;

void check_arity(std::size_t have, std::size_t want, const char* who) {
  if (have != want)
    throw DimensionError(std::string(who) + ": feature arity " + std::to_string(have) +
                         " does not match model arity " + std::to_string(want));
}
}  // namespace

NaiveBayes::NaiveBayes(FeatureSchema schema) : schema_(std::move(schema)) {
  gauss_.resize(schema_.size());
  nominal_.resize(schema_.size());
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    if (schema_[f].kind == FeatureKind::nominal) {
      if (schema_[f].cardinality < 2)
        throw ContractError("nominal feature needs at least two values");
      nominal_[f][0].assign(schema_[f].cardinality, 0);
      nominal_[f][1].assign(schema_[f].cardinality, 0);
    }
  }
}

void NaiveBayes::update(const double* x, int m, int y) {
  check_arity(m, schema_.size(), "nb_update");
  if (y != 0 && y != 1) throw ContractError("nb_update: target must be 0 or 1");
  ++class_count_[y];
  for (int f = 0; f < m; ++f) {
    double v = x[f];
    if (std::isnan(v)) continue;  // missing
    if (schema_[f].kind == FeatureKind::numeric) {
      if (std::isinf(v)) throw Error("nb_update: non-finite feature value");
      Gauss& g = gauss_[f][y];
      ++g.n;
      double d = v - g.mean;
      g.mean += d / static_cast<double>(g.n);
      g.m2 += d * (v - g.mean);
    } else {
      int idx = static_cast<int>(v);
      if (idx < 0 || idx >= schema_[f].cardinality || v != idx)
        throw ContractError("nb_update: nominal value out of range");
      ++nominal_[f][y][idx];
    }
  }
}

std::array<double, 2> NaiveBayes::log_posterior(const double* x, int m) const {
  check_arity(m, schema_.size(), "nb_predict");
  long total = trained();
  if (total == 0) throw ContractError("nb_predict: model never trained");

  std::array<double, 2> lp;
  for (int c = 0; c < 2; ++c)
    lp[c] = std::log((class_count_[c] + 1.0) / (total + 2.0));

  for (int f = 0; f < m; ++f) {
    double v = x[f];
    if (std::isnan(v)) continue;
    if (schema_[f].kind == FeatureKind::numeric) {
      // a density is only comparable when both classes have observed the
      // feature; otherwise skip it so a class without data falls back to
      // its prior instead of being crushed by the other side's likelihood
      if (gauss_[f][0].n == 0 || gauss_[f][1].n == 0) continue;
      for (int c = 0; c < 2; ++c) {
        const Gauss& g = gauss_[f][c];
        double var = g.n > 1 ? g.m2 / static_cast<double>(g.n - 1) : 0.0;
        if (var < kVarianceFloor) var = kVarianceFloor;
        double d = v - g.mean;
        lp[c] += -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
      }
    } else {
      int idx = static_cast<int>(v);
      if (idx < 0 || idx >= schema_[f].cardinality || v != idx)
        throw ContractError("nb_predict: nominal value out of range");
      for (int c = 0; c < 2; ++c) {
        const auto& counts = nominal_[f][c];
        long seen = 0;
        for (long n : counts) seen += n;
        lp[c] += std::log((counts[idx] + 1.0) /
                          (seen + static_cast<double>(schema_[f].cardinality)));
      }
    }
  }
  return lp;
}

std::pair<int, double> NaiveBayes::predict(const double* x, int m) const {
  auto lp = log_posterior(x, m);
  double hi = std::max(lp[0], lp[1]);
  double z = std::exp(lp[0] - hi) + std::exp(lp[1] - hi);
  double posterior1 = std::exp(lp[1] - hi) / z;
  return {lp[1] > lp[0] ? 1 : 0, posterior1};
}

nlohmann::json NaiveBayes::to_json() const {
  nlohmann::json schema = nlohmann::json::array();
  for (const auto& s : schema_)
    schema.push_back({{"kind", s.kind == FeatureKind::numeric ? "numeric" : "nominal"},
                      {"card", s.cardinality}});
  nlohmann::json gauss = nlohmann::json::array();
  nlohmann::json nominal = nlohmann::json::array();
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    if (schema_[f].kind == FeatureKind::numeric) {
      nlohmann::json per_class = nlohmann::json::array();
      for (int c = 0; c < 2; ++c)
        per_class.push_back({{"n", gauss_[f][c].n},
                             {"mean", gauss_[f][c].mean},
                             {"m2", gauss_[f][c].m2}});
      gauss.push_back(per_class);
      nominal.push_back(nullptr);
    } else {
      gauss.push_back(nullptr);
      nominal.push_back({nominal_[f][0], nominal_[f][1]});
    }
  }
  return {{"version", 1},
          {"type", "naive_bayes"},
          {"schema", schema},
          {"class_count", class_count_},
          {"gauss", gauss},
          {"nominal", nominal}};
}

NaiveBayes NaiveBayes::from_json(const nlohmann::json& j) {
  if (j.at("version") != 1 || j.at("type") != "naive_bayes")
    throw Error("naive Bayes snapshot has unknown version or type");
  FeatureSchema schema;
  for (const auto& s : j.at("schema"))
    schema.push_back({s.at("kind") == "numeric" ? FeatureKind::numeric : FeatureKind::nominal,
                      s.at("card").get<int>()});
  NaiveBayes model(schema);
  model.class_count_[0] = j.at("class_count")[0].get<long>();
  model.class_count_[1] = j.at("class_count")[1].get<long>();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].kind == FeatureKind::numeric) {
      for (int c = 0; c < 2; ++c) {
        const auto& g = j.at("gauss")[f][c];
        model.gauss_[f][c] = {g.at("n").get<long>(), g.at("mean").get<double>(),
                              g.at("m2").get<double>()};
      }
    } else {
      for (int c = 0; c < 2; ++c)
        model.nominal_[f][c] = j.at("nominal")[f][c].get<std::vector<long>>();
    }
  }
  return model;
}

SgdRegressor::SgdRegressor(int m, double learning_rate)
    : w_(Vec::Zero(m)), lr_(learning_rate) {
  if (m < 1) throw ContractError("sgd: need at least one feature");
}

void SgdRegressor::update(const double* x, int m, double target) {
  check_arity(m, static_cast<std::size_t>(w_.size()), "sgd_update");
  Eigen::Map<const Vec> xv(x, m);
  if (!xv.allFinite() || !std::isfinite(target))
    throw Error("sgd_update: non-finite input");
  double err = w_.dot(xv) + b_ - target;
  w_ -= lr_ * err * xv;
  b_ -= lr_ * err;
}

double SgdRegressor::predict(const double* x, int m) const {
  check_arity(m, static_cast<std::size_t>(w_.size()), "sgd_predict");
  Eigen::Map<const Vec> xv(x, m);
  if (!xv.allFinite()) throw Error("sgd_predict: non-finite input");
  return w_.dot(xv) + b_;
}

nlohmann::json SgdRegressor::to_json() const {
  return {{"version", 1},
          {"type", "sgd"},
          {"w", std::vector<double>(w_.data(), w_.data() + w_.size())},
          {"b", b_},
          {"lr", lr_}};
}

SgdRegressor SgdRegressor::from_json(const nlohmann::json& j) {
  if (j.at("version") != 1 || j.at("type") != "sgd")
    throw Error("sgd snapshot has unknown version or type");
  auto w = j.at("w").get<std::vector<double>>();
  SgdRegressor model(static_cast<int>(w.size()), j.at("lr").get<double>());
  for (std::size_t i = 0; i < w.size(); ++i) model.w_(static_cast<Eigen::Index>(i)) = w[i];
  model.b_ = j.at("b").get<double>();
  return model;
}

BinaryRelevance::BinaryRelevance(LearnerMode mode, const FeatureSchema& schema,
                                 int targets, double sgd_lr)
    : mode_(mode) {
  if (targets < 1) throw ContractError("binary relevance: need at least one target");
  if (mode_ == LearnerMode::classification)
    nb_.assign(targets, NaiveBayes(schema));
  else
    sgd_.assign(targets, SgdRegressor(static_cast<int>(schema.size()), sgd_lr));
}

int BinaryRelevance::targets() const {
  return static_cast<int>(mode_ == LearnerMode::classification ? nb_.size() : sgd_.size());
}

void BinaryRelevance::update(const Mat& X, const Mat& T) {
  if (X.rows() != T.rows()) throw DimensionError("br_update: row counts differ");
  if (T.cols() != targets()) throw DimensionError("br_update: target arity mismatch");
  const int m = static_cast<int>(X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double* row = X.row(i).data();
    for (int j = 0; j < targets(); ++j) {
      double t = T(i, j);
      if (mode_ == LearnerMode::classification) {
        if (t != 0.0 && t != 1.0)
          throw ContractError("br_update: classification targets must be 0/1");
        nb_[j].update(row, m, static_cast<int>(t));
      } else {
        sgd_[j].update(row, m, t);
      }
    }
  }
}

Mat BinaryRelevance::predict(const Mat& X) const {
  const int m = static_cast<int>(X.cols());
  Mat out(X.rows(), targets());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double* row = X.row(i).data();
    for (int j = 0; j < targets(); ++j)
      out(i, j) = mode_ == LearnerMode::classification
                      ? static_cast<double>(nb_[j].predict(row, m).first)
                      : sgd_[j].predict(row, m);
  }
  return out;
}

nlohmann::json BinaryRelevance::to_json() const {
  nlohmann::json learners = nlohmann::json::array();
  if (mode_ == LearnerMode::classification)
    for (const auto& l : nb_) learners.push_back(l.to_json());
  else
    for (const auto& l : sgd_) learners.push_back(l.to_json());
  return {{"version", 1},
          {"type", "binary_relevance"},
          {"mode", mode_ == LearnerMode::classification ? "classification" : "regression"},
          {"learners", learners}};
}

BinaryRelevance BinaryRelevance::from_json(const nlohmann::json& j) {
  if (j.at("version") != 1 || j.at("type") != "binary_relevance")
    throw Error("binary relevance snapshot has unknown version or type");
  BinaryRelevance model;
  model.mode_ = j.at("mode") == "classification" ? LearnerMode::classification
                                                 : LearnerMode::regression;
  for (const auto& l : j.at("learners")) {
    if (model.mode_ == LearnerMode::classification)
      model.nb_.push_back(NaiveBayes::from_json(l));
    else
      model.sgd_.push_back(SgdRegressor::from_json(l));
  }
  if (model.targets() < 1) throw Error("binary relevance snapshot has no learners");
  return model;
}

}  // namespace race
