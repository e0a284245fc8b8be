#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "race/errors.hpp"
#include "race/harness.hpp"

using namespace race;

namespace {

struct CommonOpts {
  std::string data;
  std::string labels;
  std::string synth;
  int window = 50;
  int runs = 10;
  int iter = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--data", o.data, "ARFF dataset path (or a .tsv sparse file)");
  cmd->add_option("--labels", o.labels, "Mulan label XML path, required with an ARFF file");
  cmd->add_option("--synth", o.synth,
                  "synthetic stream spec: m=..,l=..,n=..,density=..,dep=.. "
                  "(missing keys keep their defaults)");
  cmd->add_option("--window", o.window, "instances per batch")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--runs", o.runs, "repetitions over seeds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "base seed; run r uses seed+r");
  cmd->add_option("--iter", o.iter, "training presentations per batch")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "report file (stdout when omitted)");
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

Dataset resolve_dataset(const CLI::App* cmd, const CommonOpts& o) {
  const bool has_data = cmd->count("--data") > 0;
  const bool has_synth = cmd->count("--synth") > 0;
  if (has_data == has_synth)
    throw Error("give exactly one data source: --data or --synth");
  if (has_synth) return make_synth_dataset(parse_synth_spec(o.synth), o.seed);
  if (cmd->count("--labels") > 0) return load_dataset(o.data, o.labels);
  if (o.data.size() > 4 && o.data.compare(o.data.size() - 4, 4, ".tsv") == 0)
    return load_sparse_tsv(o.data);
  throw Error("--data needs --labels unless the file ends in .tsv");
}

// "obr" or "race"; "race/<variant>" pins a variant per entry so several
// race variants can be ranked in one report
std::vector<MethodSpec> parse_method_list(const std::string& arg,
                                          const std::string& default_variant,
                                          std::optional<int> k) {
  std::vector<MethodSpec> specs;
  std::istringstream in(arg);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    MethodSpec spec;
    const size_t slash = tok.find('/');
    if (slash != std::string::npos) {
      spec.method = parse_method(tok.substr(0, slash));
      if (spec.method != Method::race)
        throw Error("only race takes a variant: '" + tok + "'");
      spec.variant = parse_variant(tok.substr(slash + 1));
    } else {
      spec.method = parse_method(tok);
      if (spec.method == Method::race)
        spec.variant = parse_variant(default_variant);
    }
    if (spec.method == Method::race) spec.k = k;
    specs.push_back(spec);
  }
  if (specs.empty()) throw Error("no methods given");
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "prequential multi-label stream experiments: RACE label compression "
      "against online baselines"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string method_arg = "race";
  std::string variant_arg = "cls-fixed";
  int k_arg = 0;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "replay a stream test-then-train and report ranked metrics");
  add_common(run_cmd, run_opts);
  run_cmd->add_option(
      "--method", method_arg,
      "method or comma list of race|obr|oecc|majority|negative; "
      "race entries may pin a variant as race/<variant>");
  run_cmd->add_option("--variant", variant_arg, "race variant")
      ->check(CLI::IsMember(
          {"cls-fixed", "cls-adaptive", "reg-fixed", "reg-adaptive"}));
  run_cmd->add_option("--k", k_arg, "pseudo-label count (default: ceil(log2 l))")
      ->check(CLI::PositiveNumber);

  CommonOpts sweep_opts;
  std::string sweep_variant = "cls-fixed";
  int k_min = 0;
  int k_max = 0;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep-k", "rerun race across a range of pseudo-label counts");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--variant", sweep_variant, "race variant")
      ->check(CLI::IsMember(
          {"cls-fixed", "cls-adaptive", "reg-fixed", "reg-adaptive"}));
  sweep_cmd->add_option("--k-min", k_min, "first pseudo-label count")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--k-max", k_max, "last pseudo-label count")
      ->required()
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const CommonOpts& o = run_opts;
      const Dataset ds = resolve_dataset(run_cmd, o);
      const auto specs = parse_method_list(
          method_arg, variant_arg,
          k_arg > 0 ? std::optional<int>(k_arg) : std::nullopt);
      const HarnessConfig cfg{o.window, o.runs, o.seed, o.iter};
      emit_report(make_report(ds, specs, cfg), o.format, o.out);
    } else {
      const CommonOpts& o = sweep_opts;
      if (k_min > k_max) throw Error("--k-min must not exceed --k-max");
      const Dataset ds = resolve_dataset(sweep_cmd, o);
      std::vector<int> ks;
      for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
      const MethodSpec base{Method::race, parse_variant(sweep_variant), {}};
      const HarnessConfig cfg{o.window, o.runs, o.seed, o.iter};
      emit_report(sweep_k(ds, base, cfg, ks), o.format, o.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
