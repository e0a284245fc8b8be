#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "race/compression.hpp"
#include "race/data_io.hpp"
#include "race/metrics.hpp"
#include "race/stream.hpp"

namespace race {

enum class Method { race, obr, oecc, majority, negative };

Method parse_method(const std::string& name);
std::string method_name(Method m);

// what to run: a method plus the RACE-specific knobs (ignored otherwise)
struct MethodSpec {
  Method method = Method::race;
  RaceVariant variant = RaceVariant::cls_fixed;
  std::optional<int> k;  // pseudo-label count override

  bool operator==(const MethodSpec&) const = default;
};

struct HarnessConfig {
  int window = 50;
  int runs = 10;
  std::uint64_t seed = 1;  // run r uses seed + r
  int iter = 1;            // training presentations per batch
};

// one seeded replay of the stream; batch 0 only initializes and is unscored
struct RunResult {
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::vector<MetricsReport> batches;  // scored batches, stream order
  MetricsReport aggregate;             // equal-weight mean over batches

  bool operator==(const RunResult&) const = default;
};

// field-wise mean of per-batch reports; the runtime field is left zero
MetricsReport aggregate_batches(const std::vector<MetricsReport>& batches);

std::unique_ptr<StreamMethod> make_method(const MethodSpec& spec,
                                          const FeatureSchema& schema, int l,
                                          std::uint64_t seed);

std::vector<RunResult> run_prequential(const Dataset& ds, const MethodSpec& spec,
                                       const HarnessConfig& cfg);

struct MethodBlock {
  MethodSpec spec;
  int k_used = 0;             // resolved pseudo-label count, race only
  std::string variant_label;  // what the variant column prints
  std::vector<RunResult> runs;

  bool operator==(const MethodBlock&) const = default;
};

struct Report {
  std::string dataset;
  int window = 0;
  int runs = 0;
  int iter = 0;
  std::vector<MethodBlock> methods;

  bool operator==(const Report&) const = default;
};

Report make_report(const Dataset& ds, const std::vector<MethodSpec>& specs,
                   const HarnessConfig& cfg);

// reruns the base spec once per pseudo-label count
Report sweep_k(const Dataset& ds, const MethodSpec& base,
               const HarnessConfig& cfg, const std::vector<int>& k_values);

// rows: dataset,method,variant,metric,mean,std,rank — ranks compare methods
// within a metric; runtime rows carry no rank
std::string render_csv(const Report& r);
std::string render_json(const Report& r);
Report report_from_json(const std::string& text);

void emit_report(const Report& r, const std::string& format,
                 const std::string& path);

// synthetic source spec as given on a command line: "m=20,l=16,n=5000,..."
struct SynthSpec {
  int m = 20;
  int l = 16;
  int n = 5000;
  double density = 0.2;
  double dep = 0.6;
};

SynthSpec parse_synth_spec(const std::string& text);
Dataset make_synth_dataset(const SynthSpec& spec, std::uint64_t seed);

}  // namespace race
