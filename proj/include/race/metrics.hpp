#pragma once

#include <vector>

#include "race/matrix.hpp"

namespace race {

// running tallies from which every reported measure can be recovered;
// example-based measures need the per-row ratio sums, so those are what we keep
struct ConfusionAccumulator {
  std::vector<long> tp, fp, tn, fn;  // per label
  double jaccard_sum = 0.0;          // sum over rows of |L∩Y| / |L∪Y|  (empty/empty counts 1)
  double f1_sum = 0.0;               // sum over rows of 2|L∩Y| / (|L|+|Y|)  (empty/empty counts 1)
  long mismatched_entries = 0;
  long exact_rows = 0;
  long instances = 0;

  int labels() const { return static_cast<int>(tp.size()); }
};

void accumulate(ConfusionAccumulator& acc, const Mat& L, const Mat& Y);
void merge(ConfusionAccumulator& into, const ConfusionAccumulator& other);

double hamming_loss(const ConfusionAccumulator& acc);
double example_accuracy(const ConfusionAccumulator& acc);
double example_f1(const ConfusionAccumulator& acc);
double micro_f1(const ConfusionAccumulator& acc);
double macro_f1(const ConfusionAccumulator& acc);
double subset_accuracy(const ConfusionAccumulator& acc);

// direct forms for one (truth, prediction) pair
double hamming_loss(const Mat& L, const Mat& Y);
double example_accuracy(const Mat& L, const Mat& Y);
double example_f1(const Mat& L, const Mat& Y);
double micro_f1(const Mat& L, const Mat& Y);
double macro_f1(const Mat& L, const Mat& Y);
double subset_accuracy(const Mat& L, const Mat& Y);

struct MetricsReport {
  double example_accuracy = 0.0;
  double example_f1 = 0.0;
  double hamming_loss = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double subset_accuracy = 0.0;
  double runtime_seconds = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport report_from(const ConfusionAccumulator& acc);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1), zero for a single value
};

Aggregate mean_std(const std::vector<double>& values);

// 1 = best; ties share the smallest rank of the tied group
std::vector<int> rank_values(const std::vector<double>& values, bool lower_is_better);

}  // namespace race
