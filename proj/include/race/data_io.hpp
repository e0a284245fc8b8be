#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "race/learners.hpp"
#include "race/matrix.hpp"

namespace race {

// One attribute declaration: numeric, or nominal with its value domain in
// declaration order.
struct AttrInfo {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> values;  // nominal only

  bool operator==(const AttrInfo&) const = default;
};

// Stored cell of a sparse row. Nominal attributes hold the index into the
// value domain; NaN marks a missing entry. Absent cells mean value 0 (for
// nominal attributes: the first domain value).
struct Cell {
  int index = 0;
  double value = 0.0;
};
using SparseRow = std::vector<Cell>;

// Raw parse result: full schema and rows before label columns are split out.
struct ArffFile {
  std::string relation;
  std::vector<AttrInfo> attrs;
  std::vector<SparseRow> rows;
};

struct Dataset {
  std::string name;
  std::vector<AttrInfo> attrs;           // feature attributes only
  std::vector<SparseRow> rows;           // sparse feature rows
  Mat labels;                            // n x l, entries in {0,1}
  std::vector<std::string> label_names;

  int n() const { return static_cast<int>(rows.size()); }
  int m() const { return static_cast<int>(attrs.size()); }
  int l() const { return static_cast<int>(label_names.size()); }

  FeatureSchema schema() const;
  // materialize rows [begin, begin+count) densely; missing entries stay NaN
  Mat dense_features(int begin, int count) const;
  Mat dense_features() const { return dense_features(0, n()); }
};

ArffFile parse_arff(const std::string& text);

// label names in document order; nesting is flattened
std::vector<std::string> parse_label_xml(const std::string& text);

// splits the named label columns out of the ARFF schema and binarizes them
Dataset assemble_dataset(const ArffFile& arff,
                         const std::vector<std::string>& label_names);
Dataset load_dataset(const std::string& arff_path, const std::string& xml_path);

std::string emit_arff(const Dataset& ds);
std::string emit_label_xml(const Dataset& ds);

// line format: row \t idx:val,... \t labelbits   (second field may be empty)
Dataset parse_sparse_tsv(const std::string& text,
                         const std::string& name = "tsv");
Dataset load_sparse_tsv(const std::string& path);

// Seeded synthetic multi-label stream. Labels come from a low-rank latent
// factor model shared within label pairs; dependency_strength in [0,1] moves
// the per-pair mixing share from independent to strongly co-occurring.
// Per-label frequencies follow a fixed Zipf profile rescaled so the mean
// label density matches the request.
Dataset synth_stream(std::uint64_t seed, int n_instances, int m, int l,
                     double density, double dependency_strength);

struct StreamConfig {
  int window = 50;
  std::optional<std::uint64_t> shuffle_seed;
};

struct StreamBatch {
  Mat X;
  Mat L;
};

// slices rows into windows in stored order (or a seeded shuffle of it);
// the last batch may be short
std::vector<StreamBatch> batch_iter(const Dataset& ds,
                                    const StreamConfig& cfg);

std::string read_text_file(const std::string& path);

}  // namespace race
