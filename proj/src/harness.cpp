#include "race/harness.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "race/baselines.hpp"
#include "race/errors.hpp"

namespace race {

namespace {

using ordered_json = nlohmann::ordered_json;

struct MetricDef {
  const char* name;
  double MetricsReport::*field;
  bool lower_is_better;
  bool ranked;  // runtime is reported but never ranked
};

constexpr MetricDef kMetricDefs[] = {
    {"example-accuracy", &MetricsReport::example_accuracy, false, true},
    {"example-f1", &MetricsReport::example_f1, false, true},
    {"hamming-loss", &MetricsReport::hamming_loss, true, true},
    {"micro-f1", &MetricsReport::micro_f1, false, true},
    {"macro-f1", &MetricsReport::macro_f1, false, true},
    {"subset-accuracy", &MetricsReport::subset_accuracy, false, true},
    {"runtime-s", &MetricsReport::runtime_seconds, true, false},
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> run_means(const MethodBlock& block,
                              double MetricsReport::*field) {
  std::vector<double> out;
  out.reserve(block.runs.size());
  for (const RunResult& r : block.runs) out.push_back(r.aggregate.*field);
  return out;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "race") return Method::race;
  if (name == "obr") return Method::obr;
  if (name == "oecc") return Method::oecc;
  if (name == "majority") return Method::majority;
  if (name == "negative") return Method::negative;
  throw Error("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::race: return "race";
    case Method::obr: return "obr";
    case Method::oecc: return "oecc";
    case Method::majority: return "majority";
    case Method::negative: return "negative";
  }
  throw Error("unknown method value");
}

MetricsReport aggregate_batches(const std::vector<MetricsReport>& batches) {
  MetricsReport out;
  if (batches.empty()) return out;
  for (const MetricsReport& b : batches) {
    out.example_accuracy += b.example_accuracy;
    out.example_f1 += b.example_f1;
    out.hamming_loss += b.hamming_loss;
    out.micro_f1 += b.micro_f1;
    out.macro_f1 += b.macro_f1;
    out.subset_accuracy += b.subset_accuracy;
  }
  const double n = static_cast<double>(batches.size());
  out.example_accuracy /= n;
  out.example_f1 /= n;
  out.hamming_loss /= n;
  out.micro_f1 /= n;
  out.macro_f1 /= n;
  out.subset_accuracy /= n;
  return out;
}

std::unique_ptr<StreamMethod> make_method(const MethodSpec& spec,
                                          const FeatureSchema& schema, int l,
                                          std::uint64_t seed) {
  switch (spec.method) {
    case Method::race: {
      RaceConfig cfg;
      cfg.l = l;
      cfg.k = spec.k.value_or(default_k(l));
      cfg.variant = spec.variant;
      cfg.seed = seed;
      return std::make_unique<RaceModel>(cfg, schema);
    }
    case Method::obr:
      return std::make_unique<ObrModel>(schema, l);
    case Method::oecc:
      return std::make_unique<OeccModel>(schema, l, seed);
    case Method::majority:
      return std::make_unique<MajorityModel>(l);
    case Method::negative:
      return std::make_unique<NegativeModel>(l);
  }
  throw Error("unknown method value");
}

std::vector<RunResult> run_prequential(const Dataset& ds, const MethodSpec& spec,
                                       const HarnessConfig& cfg) {
  if (cfg.runs < 1) throw Error("runs must be >= 1");
  if (cfg.iter < 1) throw Error("iter must be >= 1");
  const auto batches = batch_iter(ds, {.window = cfg.window, .shuffle_seed = {}});
  if (batches.size() < 2)
    throw Error("stream too short: batch 0 only initializes, nothing left to score");

  std::vector<RunResult> out;
  out.reserve(cfg.runs);
  for (int r = 0; r < cfg.runs; ++r) {
    RunResult res;
    res.seed = cfg.seed + static_cast<std::uint64_t>(r);

    const auto t0 = std::chrono::steady_clock::now();
    std::unique_ptr<StreamMethod> model;
    try {
      model = make_method(spec, ds.schema(), ds.l(), res.seed);
      model->init(batches[0].X, batches[0].L);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (batch 0)");
    }
    for (size_t t = 1; t < batches.size(); ++t) {
      try {
        const Mat Y = model->predict(batches[t].X);
        ConfusionAccumulator acc;
        accumulate(acc, batches[t].L, Y);
        res.batches.push_back(report_from(acc));
        for (int it = 0; it < cfg.iter; ++it)
          model->train(batches[t].X, batches[t].L);
      } catch (const Error& e) {
        throw Error(std::string(e.what()) + " (batch " + std::to_string(t) + ")");
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    res.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
    res.aggregate = aggregate_batches(res.batches);
    res.aggregate.runtime_seconds = res.runtime_seconds;
    out.push_back(std::move(res));
  }
  return out;
}

Report make_report(const Dataset& ds, const std::vector<MethodSpec>& specs,
                   const HarnessConfig& cfg) {
  Report rep;
  rep.dataset = ds.name;
  rep.window = cfg.window;
  rep.runs = cfg.runs;
  rep.iter = cfg.iter;
  for (const MethodSpec& spec : specs) {
    MethodBlock block;
    block.spec = spec;
    if (spec.method == Method::race) {
      block.k_used = spec.k.value_or(default_k(ds.l()));
      block.spec.k = block.k_used;  // pin the resolved value in the record
      block.variant_label = variant_name(spec.variant);
    } else {
      block.spec.variant = RaceVariant::cls_fixed;
      block.spec.k.reset();
    }
    block.runs = run_prequential(ds, spec, cfg);
    rep.methods.push_back(std::move(block));
  }
  return rep;
}

Report sweep_k(const Dataset& ds, const MethodSpec& base,
               const HarnessConfig& cfg, const std::vector<int>& k_values) {
  if (k_values.empty()) throw Error("sweep_k: no k values given");
  Report rep;
  rep.dataset = ds.name;
  rep.window = cfg.window;
  rep.runs = cfg.runs;
  rep.iter = cfg.iter;
  for (int k : k_values) {
    if (k < 1) throw Error("sweep_k: k must be >= 1");
    MethodSpec spec = base;
    spec.method = Method::race;
    spec.k = k;
    MethodBlock block;
    block.spec = spec;
    block.k_used = k;
    block.variant_label =
        variant_name(spec.variant) + "(k=" + std::to_string(k) + ")";
    block.runs = run_prequential(ds, spec, cfg);
    rep.methods.push_back(std::move(block));
  }
  return rep;
}

std::string render_csv(const Report& r) {
  std::ostringstream out;
  out << "dataset,method,variant,metric,mean,std,rank\n";
  for (const MetricDef& def : kMetricDefs) {
    std::vector<Aggregate> aggs;
    std::vector<double> means;
    for (const MethodBlock& block : r.methods) {
      aggs.push_back(mean_std(run_means(block, def.field)));
      means.push_back(aggs.back().mean);
    }
    std::vector<int> ranks;
    if (def.ranked) ranks = rank_values(means, def.lower_is_better);
    for (size_t i = 0; i < r.methods.size(); ++i) {
      out << r.dataset << ',' << method_name(r.methods[i].spec.method) << ','
          << r.methods[i].variant_label << ',' << def.name << ','
          << fixed6(aggs[i].mean) << ',' << fixed6(aggs[i].std) << ',';
      if (def.ranked) out << ranks[i];
      out << '\n';
    }
  }
  return out.str();
}

std::string render_json(const Report& r) {
  ordered_json root;
  root["dataset"] = r.dataset;
  root["window"] = r.window;
  root["runs"] = r.runs;
  root["iter"] = r.iter;
  root["methods"] = ordered_json::array();

  // per-metric summaries with the same ranking the CSV carries
  std::vector<ordered_json> summaries(r.methods.size());
  for (const MetricDef& def : kMetricDefs) {
    std::vector<double> means;
    std::vector<Aggregate> aggs;
    for (const MethodBlock& block : r.methods) {
      aggs.push_back(mean_std(run_means(block, def.field)));
      means.push_back(aggs.back().mean);
    }
    std::vector<int> ranks;
    if (def.ranked) ranks = rank_values(means, def.lower_is_better);
    for (size_t i = 0; i < r.methods.size(); ++i) {
      ordered_json cell;
      cell["mean"] = aggs[i].mean;
      cell["std"] = aggs[i].std;
      if (def.ranked) cell["rank"] = ranks[i];
      summaries[i][def.name] = std::move(cell);
    }
  }

  for (size_t i = 0; i < r.methods.size(); ++i) {
    const MethodBlock& block = r.methods[i];
    ordered_json jb;
    jb["method"] = method_name(block.spec.method);
    jb["variant"] = block.variant_label;
    jb["k"] = block.k_used;
    jb["summary"] = std::move(summaries[i]);
    jb["runs"] = ordered_json::array();
    for (const RunResult& run : block.runs) {
      ordered_json jr;
      jr["seed"] = run.seed;
      jr["runtime_s"] = run.runtime_seconds;
      ordered_json series;
      for (const MetricDef& def : kMetricDefs) {
        if (!def.ranked) continue;  // runtime has no per-batch series
        ordered_json arr = ordered_json::array();
        for (const MetricsReport& b : run.batches) arr.push_back(b.*(def.field));
        series[def.name] = std::move(arr);
      }
      jr["series"] = std::move(series);
      jb["runs"].push_back(std::move(jr));
    }
    root["methods"].push_back(std::move(jb));
  }
  return root.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  const auto root = nlohmann::json::parse(text);
  Report rep;
  rep.dataset = root.at("dataset").get<std::string>();
  rep.window = root.at("window").get<int>();
  rep.runs = root.at("runs").get<int>();
  rep.iter = root.at("iter").get<int>();
  for (const auto& jb : root.at("methods")) {
    MethodBlock block;
    block.spec.method = parse_method(jb.at("method").get<std::string>());
    block.variant_label = jb.at("variant").get<std::string>();
    block.k_used = jb.at("k").get<int>();
    if (block.spec.method == Method::race) {
      // sweeps append "(k=N)" to the variant column; strip it to recover
      const std::string& v = block.variant_label;
      const size_t paren = v.find('(');
      block.spec.variant = parse_variant(
          paren == std::string::npos ? v : v.substr(0, paren));
      block.spec.k = block.k_used;
    }
    for (const auto& jr : jb.at("runs")) {
      RunResult run;
      run.seed = jr.at("seed").get<std::uint64_t>();
      run.runtime_seconds = jr.at("runtime_s").get<double>();
      const auto& series = jr.at("series");
      const size_t nb = series.at("example-accuracy").size();
      run.batches.resize(nb);
      for (const MetricDef& def : kMetricDefs) {
        if (!def.ranked) continue;
        const auto& arr = series.at(def.name);
        if (arr.size() != nb) throw Error("report json: ragged series");
        for (size_t t = 0; t < nb; ++t)
          run.batches[t].*(def.field) = arr[t].get<double>();
      }
      run.aggregate = aggregate_batches(run.batches);
      run.aggregate.runtime_seconds = run.runtime_seconds;
      block.runs.push_back(std::move(run));
    }
    rep.methods.push_back(std::move(block));
  }
  return rep;
}

void emit_report(const Report& r, const std::string& format,
                 const std::string& path) {
  std::string text;
  if (format == "csv") {
    text = render_csv(r);
  } else if (format == "json") {
    text = render_json(r);
  } else {
    throw Error("unknown report format '" + format + "'");
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report: " + path);
  out << text;
  if (!out) throw Error("cannot write report: " + path);
}

SynthSpec parse_synth_spec(const std::string& text) {
  SynthSpec spec;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw Error("synth spec entry '" + item + "' needs key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      size_t used = 0;
      if (key == "m") {
        spec.m = std::stoi(val, &used);
      } else if (key == "l") {
        spec.l = std::stoi(val, &used);
      } else if (key == "n") {
        spec.n = std::stoi(val, &used);
      } else if (key == "density") {
        spec.density = std::stod(val, &used);
      } else if (key == "dep") {
        spec.dep = std::stod(val, &used);
      } else {
        throw Error("unknown synth spec key '" + key + "'");
      }
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::invalid_argument&) {
      throw Error("bad synth spec value '" + val + "' for key '" + key + "'");
    } catch (const std::out_of_range&) {
      throw Error("bad synth spec value '" + val + "' for key '" + key + "'");
    }
  }
  return spec;
}

Dataset make_synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
  return synth_stream(seed, spec.n, spec.m, spec.l, spec.density, spec.dep);
}

}  // namespace race
