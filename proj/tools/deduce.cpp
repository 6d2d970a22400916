// Command-line front end: generate datasets, grade predictions, run
// experiments and print score tables.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "deduce/compgen.hpp"
#include "deduce/harness.hpp"
#include "deduce/rulegen.hpp"

using namespace deduce;

namespace {

struct GenerateArgs {
  std::string rule;
  bool compositional = false;
  std::size_t depth = 0, width = 0, min_depth = 1, rule_types = 1, count = 1;
  bool distractors = false;
  std::string ordering = "random";
  std::uint64_t seed = 0;
  std::string output = "-";
};

int generate(const GenerateArgs& a) {
  auto ordering = ordering_from_string(a.ordering);
  if (!ordering) throw CLI::ValidationError("--ordering", "must be random or postorder");
  Distribution dist;
  if (a.compositional) {
    dist.kind = ExampleKind::Compositional;
    dist.compositional.min_depth = a.min_depth;
    dist.compositional.num_rule_types = a.rule_types;
    dist.compositional.distractors = a.distractors;
    dist.compositional.ordering = *ordering;
  } else {
    auto rule = rule_tag_from_string(a.rule);
    if (!rule) throw CLI::ValidationError("--rule", "unknown rule '" + a.rule + "'");
    dist.rule = default_rule_params(*rule);
    if (a.depth) dist.rule.depth = a.depth;
    if (a.width) dist.rule.width = a.width;
    dist.rule.distractors = a.distractors;
    dist.rule.ordering = *ordering;
  }
  std::vector<Example> out;
  Rng seeds(a.seed);
  for (std::size_t i = 0; i < a.count; ++i) out.push_back(sample_example(dist, seeds.derive(i).next()));
  if (a.output == "-")
    write_dataset(std::cout, out);
  else
    write_dataset(a.output, out);
  return 0;
}

int evaluate(const std::string& dataset, const std::string& predictions, const std::string& output, bool strict) {
  auto data = read_dataset(dataset);
  std::ifstream in(predictions, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + predictions);
  auto reports = evaluate_predictions(data, in, !strict);
  std::ofstream file;
  if (output != "-") {
    file.open(output, std::ios::binary);
    if (!file) throw DatasetError("cannot write " + output);
  }
  std::ostream& out = output == "-" ? std::cout : file;
  std::size_t correct = 0;
  for (const auto& r : reports) {
    out << r.dump() << '\n';
    correct += r["correct"].get<bool>();
  }
  std::cerr << correct << " of " << reports.size() << " predictions correct\n";
  return 0;
}

void print_row(std::ostream& out, char sep, const ScoreRow& r) {
  char acc[64];
  std::snprintf(acc, sizeof acc, "%.4f%c%.4f%c%.4f", r.accuracy, sep, r.ci_low, sep, r.ci_high);
  out << r.group << sep << r.graded << sep << r.successes << sep << r.errored << sep << acc << '\n';
}

void print_header(std::ostream& out, char sep) {
  out << "group" << sep << "graded" << sep << "correct" << sep << "errored" << sep << "accuracy" << sep << "ci_low"
      << sep << "ci_high\n";
}

int run(const std::string& config_path, const std::string& results, const std::string& format) {
  auto config = load_config(config_path);
  if (!results.empty()) config.results_path = results;
  auto r = run_experiment(config);
  ScoreRow row{config.name, r.graded, r.successes, r.errored, r.proof_accuracy, r.ci_low, r.ci_high};
  char sep = format == "tsv" ? '\t' : ',';
  print_header(std::cout, sep);
  print_row(std::cout, sep, row);
  return 0;
}

int score(const std::vector<std::string>& paths, const std::string& format) {
  char sep = format == "tsv" ? '\t' : ',';
  print_header(std::cout, sep);
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DatasetError("cannot read " + p);
    for (const auto& row : score_results(in)) print_row(std::cout, sep, row);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deduction benchmark generator, proof grader and experiment runner"};
  app.require_subcommand(1);

  GenerateArgs g;
  auto* gen = app.add_subcommand("generate", "Write generated examples as JSONL");
  auto* rule_opt = gen->add_option("--rule", g.rule, "Deduction rule, e.g. implication_elimination");
  auto* comp_flag = gen->add_flag("--compositional", g.compositional, "Compositional examples");
  rule_opt->excludes(comp_flag);
  gen->add_option("--depth", g.depth, "Proof depth (per-rule examples)");
  gen->add_option("--width", g.width, "Proof width (per-rule examples)");
  gen->add_option("--min-depth", g.min_depth, "Minimum depth (compositional)");
  gen->add_option("--rule-types", g.rule_types, "Number of rule types (compositional)");
  gen->add_flag("--distractors", g.distractors, "Add distractor sentences");
  gen->add_option("--ordering", g.ordering, "random or postorder");
  gen->add_option("--count", g.count, "Number of examples");
  gen->add_option("--seed", g.seed, "Base seed");
  gen->add_option("-o,--output", g.output, "Output file, - for stdout");

  std::string dataset, predictions, report = "-";
  bool strict = false;
  auto* eval = app.add_subcommand("evaluate", "Grade predicted chains of thought against a dataset");
  eval->add_option("--dataset", dataset, "Dataset JSONL")->required();
  eval->add_option("--predictions", predictions, "JSONL of {id, prediction}")->required();
  eval->add_option("-o,--output", report, "Report JSONL, - for stdout");
  eval->add_flag("--strict", strict, "Reject modus tollens and transitivity steps");

  std::string config, results, format = "csv";
  auto* runc = app.add_subcommand("run", "Run an experiment described by a TOML file");
  runc->add_option("--config", config, "Experiment TOML")->required()->check(CLI::ExistingFile);
  runc->add_option("--results", results, "Override the results JSONL path");
  runc->add_option("--format", format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));

  std::vector<std::string> score_paths;
  auto* sc = app.add_subcommand("score", "Accuracy and 95% interval per group");
  sc->add_option("--results", score_paths, "Results or report JSONL files")->required();
  sc->add_option("--format", format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!g.compositional && g.rule.empty()) throw CLI::ValidationError("generate", "give --rule or --compositional");
      return generate(g);
    }
    if (*eval) return evaluate(dataset, predictions, report, strict);
    if (*runc) return run(config, results, format);
    if (*sc) return score(score_paths, format);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
