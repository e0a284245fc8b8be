#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "race/matrix.hpp"

namespace race {

enum class FeatureKind { numeric, nominal };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::numeric;
  int cardinality = 0;  // nominal only
};

using FeatureSchema = std::vector<FeatureSpec>;

// incremental two-class naive Bayes: Gaussian per numeric feature, Laplace
// counts per nominal feature, smoothed priors. NaN feature values are treated
// as missing and skipped on both update and prediction.
class NaiveBayes {
 public:
  NaiveBayes() = default;
  explicit NaiveBayes(FeatureSchema schema);

  void update(const double* x, int m, int y);
  // (hard label, posterior of class 1); exact posterior ties go to 0
  std::pair<int, double> predict(const double* x, int m) const;
  std::array<double, 2> log_posterior(const double* x, int m) const;
  long trained() const { return class_count_[0] + class_count_[1]; }

  nlohmann::json to_json() const;
  static NaiveBayes from_json(const nlohmann::json& j);

 private:
  struct Gauss {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  FeatureSchema schema_;
  std::array<long, 2> class_count_{0, 0};
  std::vector<std::array<Gauss, 2>> gauss_;                 // per numeric feature
  std::vector<std::array<std::vector<long>, 2>> nominal_;   // per nominal feature
};

// plain squared-loss SGD on a linear model, constant learning rate
class SgdRegressor {
 public:
  SgdRegressor() = default;
  explicit SgdRegressor(int m, double learning_rate = 1e-4);

  void update(const double* x, int m, double target);
  double predict(const double* x, int m) const;

  nlohmann::json to_json() const;
  static SgdRegressor from_json(const nlohmann::json& j);

 private:
  Vec w_;
  double b_ = 0.0;
  double lr_ = 1e-4;
};

enum class LearnerMode { classification, regression };

// one independent learner per target column
class BinaryRelevance {
 public:
  BinaryRelevance() = default;
  BinaryRelevance(LearnerMode mode, const FeatureSchema& schema, int targets,
                  double sgd_lr = 1e-4);

  void update(const Mat& X, const Mat& T);
  Mat predict(const Mat& X) const;  // hard 0/1 columns in classification mode

  LearnerMode mode() const { return mode_; }
  int targets() const;

  nlohmann::json to_json() const;
  static BinaryRelevance from_json(const nlohmann::json& j);

 private:
  LearnerMode mode_ = LearnerMode::classification;
  std::vector<NaiveBayes> nb_;
  std::vector<SgdRegressor> sgd_;
};

}  // namespace race
