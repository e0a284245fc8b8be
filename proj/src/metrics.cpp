#include "race/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace race {

void accumulate(ConfusionAccumulator& acc, const Mat& L, const Mat& Y) {
  if (L.rows() != Y.rows() || L.cols() != Y.cols())
    throw DimensionError("metrics: truth and prediction shapes differ");
  require_binary(L, "truth matrix");
  require_binary(Y, "prediction matrix");

  const int l = static_cast<int>(L.cols());
  if (acc.tp.empty()) {
    acc.tp.assign(l, 0);
    acc.fp.assign(l, 0);
    acc.tn.assign(l, 0);
    acc.fn.assign(l, 0);
  } else if (acc.labels() != l) {
    throw DimensionError("metrics: label arity changed mid-accumulation");
  }

  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    long inter = 0, uni = 0, lsum = 0, ysum = 0, wrong = 0;
    for (int j = 0; j < l; ++j) {
      bool t = L(i, j) != 0.0, p = Y(i, j) != 0.0;
      if (t && p) ++acc.tp[j];
      else if (!t && p) ++acc.fp[j];
      else if (t && !p) ++acc.fn[j];
      else ++acc.tn[j];
      inter += t && p;
      uni += t || p;
      lsum += t;
      ysum += p;
      wrong += t != p;
    }
    acc.jaccard_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    acc.f1_sum += lsum + ysum == 0 ? 1.0 : 2.0 * inter / static_cast<double>(lsum + ysum);
    acc.mismatched_entries += wrong;
    acc.exact_rows += wrong == 0;
    ++acc.instances;
  }
}

void merge(ConfusionAccumulator& into, const ConfusionAccumulator& other) {
  if (into.tp.empty()) {
    into = other;
    return;
  }
  if (other.tp.empty()) return;
  if (into.labels() != other.labels())
    throw DimensionError("metrics: cannot merge accumulators of different arity");
  for (int j = 0; j < into.labels(); ++j) {
    into.tp[j] += other.tp[j];
    into.fp[j] += other.fp[j];
    into.tn[j] += other.tn[j];
    into.fn[j] += other.fn[j];
  }
  into.jaccard_sum += other.jaccard_sum;
  into.f1_sum += other.f1_sum;
  into.mismatched_entries += other.mismatched_entries;
  into.exact_rows += other.exact_rows;
  into.instances += other.instances;
}

double hamming_loss(const ConfusionAccumulator& acc) {
  if (acc.instances == 0 || acc.labels() == 0) return 0.0;
  return static_cast<double>(acc.mismatched_entries) /
         (static_cast<double>(acc.instances) * acc.labels());
}

double example_accuracy(const ConfusionAccumulator& acc) {
  return acc.instances == 0 ? 0.0 : acc.jaccard_sum / acc.instances;
}

double example_f1(const ConfusionAccumulator& acc) {
  return acc.instances == 0 ? 0.0 : acc.f1_sum / acc.instances;
}

double micro_f1(const ConfusionAccumulator& acc) {
  long tp = std::accumulate(acc.tp.begin(), acc.tp.end(), 0L);
  long fp = std::accumulate(acc.fp.begin(), acc.fp.end(), 0L);
  long fn = std::accumulate(acc.fn.begin(), acc.fn.end(), 0L);
  long denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * tp / denom;
}

double macro_f1(const ConfusionAccumulator& acc) {
  if (acc.labels() == 0) return 0.0;
  double sum = 0.0;
  for (int j = 0; j < acc.labels(); ++j) {
    long denom = 2 * acc.tp[j] + acc.fp[j] + acc.fn[j];
    sum += denom == 0 ? 0.0 : 2.0 * acc.tp[j] / denom;
  }
  return sum / acc.labels();
}

double subset_accuracy(const ConfusionAccumulator& acc) {
  return acc.instances == 0 ? 0.0
                            : static_cast<double>(acc.exact_rows) / acc.instances;
}

namespace {
ConfusionAccumulator one_shot(const Mat& L, const Mat& Y) {
  ConfusionAccumulator acc;
  accumulate(acc, L, Y);
  return acc;
}
}  // namespace

double hamming_loss(const Mat& L, const Mat& Y) { return hamming_loss(one_shot(L, Y)); }
double example_accuracy(const Mat& L, const Mat& Y) { return example_accuracy(one_shot(L, Y)); }
double example_f1(const Mat& L, const Mat& Y) { return example_f1(one_shot(L, Y)); }
double micro_f1(const Mat& L, const Mat& Y) { return micro_f1(one_shot(L, Y)); }
double macro_f1(const Mat& L, const Mat& Y) { return macro_f1(one_shot(L, Y)); }
double subset_accuracy(const Mat& L, const Mat& Y) { return subset_accuracy(one_shot(L, Y)); }

MetricsReport report_from(const ConfusionAccumulator& acc) {
  MetricsReport r;
  r.example_accuracy = example_accuracy(acc);
  r.example_f1 = example_f1(acc);
  r.hamming_loss = hamming_loss(acc);
  r.micro_f1 = micro_f1(acc);
  r.macro_f1 = macro_f1(acc);
  r.subset_accuracy = subset_accuracy(acc);
  return r;
}

Aggregate mean_std(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / (values.size() - 1.0));
  }
  return a;
}

std::vector<int> rank_values(const std::vector<double>& values, bool lower_is_better) {
  std::vector<int> rank(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    int better = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == i) continue;
      bool beats = lower_is_better ? values[j] < values[i] : values[j] > values[i];
      better += beats;
    }
    rank[i] = better + 1;  // ties naturally share the smallest rank
  }
  return rank;
}

}  // namespace race
