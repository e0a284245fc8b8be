#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "race/errors.hpp"
#include "race/harness.hpp"

using namespace race;

namespace {

struct CsvRow {
  std::string dataset, method, variant, metric, mean, std_, rank;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "dataset,method,variant,metric,mean,std,rank");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    if (f.size() == 6) f.push_back("");  // empty trailing rank field
    REQUIRE(f.size() == 7);
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
  }
  return rows;
}

std::string drop_runtime_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("runtime-s") == std::string::npos) out << line << '\n';
  return out.str();
}

nlohmann::json masked_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  for (auto& method : j.at("methods")) {
    method.at("summary").erase("runtime-s");
    for (auto& run : method.at("runs")) run.erase("runtime_s");
  }
  return j;
}

bool batches_equal(const std::vector<RunResult>& a,
                   const std::vector<RunResult>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].seed != b[i].seed || a[i].batches != b[i].batches) return false;
  return true;
}

}  // namespace

TEST_CASE("negative's aggregate hamming loss tracks the stream density") {
  const Dataset ds = synth_stream(21, 2000, 8, 10, 0.15, 0.3);
  const auto runs = run_prequential(ds, {.method = Method::negative},
                                    {.window = 100, .runs = 1, .seed = 5});
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].aggregate.hamming_loss > 0.14);
  CHECK(runs[0].aggregate.hamming_loss < 0.16);
  // all-negative predictions can never match a row with a positive label
  CHECK(runs[0].aggregate.micro_f1 == 0.0);
}

TEST_CASE("a 502-row stream at window 50 scores ten batches") {
  const Dataset ds = synth_stream(9, 502, 5, 6, 0.2, 0.4);
  const auto runs = run_prequential(ds, {.method = Method::negative},
                                    {.window = 50, .runs = 1, .seed = 1});
  CHECK(runs[0].batches.size() == 10);
}

TEST_CASE("each run gets its own seed; deterministic methods repeat exactly") {
  const Dataset ds = synth_stream(3, 800, 6, 8, 0.2, 0.5);
  const HarnessConfig cfg{.window = 100, .runs = 10, .seed = 40};

  const auto neg = run_prequential(ds, {.method = Method::negative}, cfg);
  REQUIRE(neg.size() == 10);
  for (int r = 0; r < 10; ++r) CHECK(neg[r].seed == 40 + r);
  for (int r = 1; r < 10; ++r) CHECK(neg[r].batches == neg[0].batches);

  const auto maj = run_prequential(ds, {.method = Method::majority}, cfg);
  for (int r = 1; r < 10; ++r) CHECK(maj[r].batches == maj[0].batches);

  // the race encoder is seeded per run, so runs differ
  const auto race = run_prequential(
      ds, {.method = Method::race, .variant = RaceVariant::cls_adaptive, .k = 3},
      {.window = 100, .runs = 2, .seed = 40});
  CHECK(race[0].batches != race[1].batches);
}

TEST_CASE("batch labels never influence that batch's own predictions") {
  const Dataset a = synth_stream(13, 600, 6, 8, 0.25, 0.5);
  Dataset b = a;
  // complement every label in stream batch 3 (rows 300..399)
  b.labels.block(300, 0, 100, a.l()) =
      Mat::Ones(100, a.l()) - a.labels.block(300, 0, 100, a.l());

  const MethodSpec spec{.method = Method::race,
                        .variant = RaceVariant::cls_adaptive};
  const HarnessConfig cfg{.window = 100, .runs = 1, .seed = 11};
  const auto ra = run_prequential(a, spec, cfg);
  const auto rb = run_prequential(b, spec, cfg);
  REQUIRE(ra[0].batches.size() == 5);

  // prefix untouched: the probe batch is in the future there
  CHECK(ra[0].batches[0] == rb[0].batches[0]);
  CHECK(ra[0].batches[1] == rb[0].batches[1]);
  // same predictions scored against complemented truth flip every entry
  CHECK(std::abs(rb[0].batches[2].hamming_loss -
                 (1.0 - ra[0].batches[2].hamming_loss)) < 1e-12);
}

TEST_CASE("iteration count is honored and only matters for learners") {
  const Dataset ds = synth_stream(17, 600, 6, 8, 0.2, 0.5);
  const MethodSpec race{.method = Method::race,
                        .variant = RaceVariant::reg_adaptive};
  const auto one = run_prequential(ds, race, {.window = 100, .runs = 1, .seed = 7, .iter = 1});
  const auto three = run_prequential(ds, race, {.window = 100, .runs = 1, .seed = 7, .iter = 3});
  CHECK(one[0].batches != three[0].batches);

  const auto neg1 = run_prequential(ds, {.method = Method::negative},
                                    {.window = 100, .runs = 1, .seed = 7, .iter = 1});
  const auto neg3 = run_prequential(ds, {.method = Method::negative},
                                    {.window = 100, .runs = 1, .seed = 7, .iter = 3});
  CHECK(neg1[0].batches == neg3[0].batches);
}

TEST_CASE("config guards") {
  const Dataset ds = synth_stream(2, 120, 4, 4, 0.25, 0.2);
  CHECK_THROWS_AS(run_prequential(ds, {.method = Method::negative},
                                  {.window = 50, .runs = 0, .seed = 1}),
                  Error);
  CHECK_THROWS_AS(run_prequential(ds, {.method = Method::negative},
                                  {.window = 50, .runs = 1, .seed = 1, .iter = 0}),
                  Error);
  // one batch only: nothing left to score after initialization
  CHECK_THROWS_AS(run_prequential(ds, {.method = Method::negative},
                                  {.window = 200, .runs = 1, .seed = 1}),
                  Error);
}

TEST_CASE("failures are reported with the batch index") {
  const Dataset ds = synth_stream(2, 120, 4, 4, 0.25, 0.2);
  // k far above l makes the encoder draw impossible, caught at batch 0
  try {
    run_prequential(ds, {.method = Method::race, .k = 50},
                    {.window = 40, .runs = 1, .seed = 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(batch 0)") != std::string::npos);
  }
}

TEST_CASE("method names parse and dispatch") {
  CHECK(parse_method("race") == Method::race);
  CHECK(parse_method("obr") == Method::obr);
  CHECK(parse_method("oecc") == Method::oecc);
  CHECK(parse_method("majority") == Method::majority);
  CHECK(parse_method("negative") == Method::negative);
  CHECK_THROWS_AS(parse_method("bogus"), Error);
  for (Method m : {Method::race, Method::obr, Method::oecc, Method::majority,
                   Method::negative})
    CHECK(parse_method(method_name(m)) == m);

  // every method drives end to end on a short stream
  const Dataset ds = synth_stream(6, 200, 5, 6, 0.2, 0.4);
  for (Method m : {Method::race, Method::obr, Method::oecc, Method::majority,
                   Method::negative}) {
    const auto runs = run_prequential(ds, {.method = m, .variant = RaceVariant::reg_fixed},
                                      {.window = 50, .runs = 1, .seed = 9});
    CHECK(runs[0].batches.size() == 3);
    CHECK(runs[0].runtime_seconds >= 0.0);
  }
}

TEST_CASE("csv report: fixed columns, ranked rows, runtime unranked") {
  const Dataset ds = synth_stream(8, 600, 6, 8, 0.2, 0.5);
  const std::vector<MethodSpec> specs{
      {.method = Method::race, .variant = RaceVariant::reg_fixed},
      {.method = Method::majority},
      {.method = Method::negative}};
  const Report rep = make_report(ds, specs, {.window = 100, .runs = 2, .seed = 30});
  const auto rows = parse_csv(render_csv(rep));
  // 7 metrics x 3 methods
  REQUIRE(rows.size() == 21);

  for (const CsvRow& row : rows) {
    CHECK(row.dataset == "synth");
    if (row.metric == "runtime-s") {
      CHECK(row.rank.empty());
    } else {
      const int rank = std::stoi(row.rank);
      CHECK(rank >= 1);
      CHECK(rank <= 3);
    }
    if (row.method == "race") CHECK(row.variant == "reg-fixed");
    if (row.method == "negative") CHECK(row.variant.empty());
  }

  SUBCASE("ranks recomputed from the emitted means agree") {
    for (const char* metric :
         {"example-accuracy", "example-f1", "hamming-loss", "micro-f1",
          "macro-f1", "subset-accuracy"}) {
      std::vector<double> means;
      std::vector<int> printed;
      for (const CsvRow& row : rows) {
        if (row.metric != metric) continue;
        means.push_back(std::stod(row.mean));
        printed.push_back(std::stoi(row.rank));
      }
      REQUIRE(means.size() == 3);
      CHECK(rank_values(means, std::string(metric) == "hamming-loss") == printed);
    }
  }

  SUBCASE("two methods give two ranked rows per metric") {
    const Report two = make_report(
        ds, {specs[0], specs[2]}, {.window = 100, .runs = 1, .seed = 30});
    int micro_rows = 0;
    bool saw_rank_one = false;
    for (const CsvRow& row : parse_csv(render_csv(two))) {
      if (row.metric != "micro-f1") continue;
      ++micro_rows;
      if (row.rank == "1") saw_rank_one = true;
    }
    CHECK(micro_rows == 2);
    CHECK(saw_rank_one);
  }
}

TEST_CASE("an empty report renders as a bare csv header") {
  CHECK(render_csv(Report{}) == "dataset,method,variant,metric,mean,std,rank\n");
}

TEST_CASE("identical configs reproduce the report byte for byte") {
  const Dataset ds = synth_stream(14, 600, 6, 8, 0.2, 0.5);
  const std::vector<MethodSpec> specs{
      {.method = Method::race, .variant = RaceVariant::cls_adaptive},
      {.method = Method::negative}};
  const HarnessConfig cfg{.window = 100, .runs = 2, .seed = 77};
  const Report a = make_report(ds, specs, cfg);
  const Report b = make_report(ds, specs, cfg);
  CHECK(drop_runtime_rows(render_csv(a)) == drop_runtime_rows(render_csv(b)));
  CHECK(masked_json(render_json(a)) == masked_json(render_json(b)));
}

TEST_CASE("json reports round-trip to equal in-memory results") {
  const Dataset ds = synth_stream(4, 500, 5, 6, 0.25, 0.4);
  const std::vector<MethodSpec> specs{
      {.method = Method::race, .variant = RaceVariant::reg_fixed, .k = 4},
      {.method = Method::obr}};
  const Report rep = make_report(ds, specs, {.window = 100, .runs = 2, .seed = 12});
  const Report back = report_from_json(render_json(rep));
  CHECK(back == rep);
}

TEST_CASE("reports can be written out and read back") {
  const Dataset ds = synth_stream(4, 300, 4, 4, 0.25, 0.4);
  const Report rep = make_report(ds, {{.method = Method::negative}},
                                 {.window = 100, .runs = 1, .seed = 2});
  const std::string path = "/tmp/race_harness_report_test.json";
  emit_report(rep, "json", path);
  CHECK(report_from_json(read_text_file(path)) == rep);
  std::remove(path.c_str());

  CHECK_THROWS_AS(emit_report(rep, "yaml", path), Error);
  CHECK_THROWS_AS(emit_report(rep, "csv", "/nonexistent_dir/x.csv"), Error);
}

TEST_CASE("a one-element k sweep equals a plain run") {
  const Dataset ds = synth_stream(19, 500, 5, 6, 0.2, 0.5);
  const MethodSpec base{.method = Method::race, .variant = RaceVariant::reg_fixed};
  const HarnessConfig cfg{.window = 100, .runs = 2, .seed = 60};

  const Report swept = sweep_k(ds, base, cfg, {4});
  REQUIRE(swept.methods.size() == 1);
  CHECK(swept.methods[0].k_used == 4);
  CHECK(swept.methods[0].variant_label == "reg-fixed(k=4)");

  MethodSpec pinned = base;
  pinned.k = 4;
  const auto direct = run_prequential(ds, pinned, cfg);
  CHECK(batches_equal(swept.methods[0].runs, direct));
}

TEST_CASE("a k sweep emits one series per k value") {
  const Dataset ds = synth_stream(19, 500, 5, 6, 0.2, 0.5);
  const Report rep = sweep_k(ds, {.method = Method::race, .variant = RaceVariant::cls_fixed},
                             {.window = 100, .runs = 1, .seed = 8}, {2, 3, 5});
  REQUIRE(rep.methods.size() == 3);
  CHECK(rep.methods[0].k_used == 2);
  CHECK(rep.methods[2].k_used == 5);

  int micro_rows = 0;
  for (const CsvRow& row : parse_csv(render_csv(rep)))
    if (row.metric == "micro-f1") ++micro_rows;
  CHECK(micro_rows == 3);

  CHECK_THROWS_AS(sweep_k(ds, {.method = Method::race}, {.window = 100, .runs = 1, .seed = 8},
                          std::vector<int>{}),
                  Error);
}

TEST_CASE("synth specs parse with defaults and reject junk") {
  const SynthSpec full = parse_synth_spec("m=7,l=9,n=1234,density=0.31,dep=0.25");
  CHECK(full.m == 7);
  CHECK(full.l == 9);
  CHECK(full.n == 1234);
  CHECK(full.density == 0.31);
  CHECK(full.dep == 0.25);

  const SynthSpec partial = parse_synth_spec("l=4");
  CHECK(partial.l == 4);
  CHECK(partial.m == 20);
  CHECK(partial.n == 5000);

  CHECK_THROWS_AS(parse_synth_spec("q=3"), Error);
  CHECK_THROWS_AS(parse_synth_spec("m"), Error);
  CHECK_THROWS_AS(parse_synth_spec("m=abc"), Error);
  CHECK_THROWS_AS(parse_synth_spec("density=0.2x"), Error);

  const Dataset ds = make_synth_dataset(partial, 5);
  CHECK(ds.l() == 4);
  CHECK(ds.n() == 5000);
}
