#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "deduce/evaluator.hpp"
#include "deduce/example.hpp"
#include "deduce/rng.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

// ---------------------------------------------------------------------------
// Dataset persistence: one JSON object per line.

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::ordered_json example_to_json(const Example& example);
/// Throws DatasetError on a missing or ill-typed field.
Example example_from_json(const nlohmann::json& record);

void write_dataset(std::ostream& out, const std::vector<Example>& examples);
void write_dataset(const std::string& path, const std::vector<Example>& examples);
std::vector<Example> read_dataset(std::istream& in);
std::vector<Example> read_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Prompts and experiment configuration.

/// "Q: <question> Prove: <query>\nA: <cot>" per demo, blank-line separated,
/// then the test question ending at "A:".
std::string build_prompt(const std::vector<Example>& demos, const Example& test);

/// Where examples of one side of an experiment come from.
struct Distribution {
  ExampleKind kind = ExampleKind::Rule;
  /// Used for rule examples; `seed` is ignored.
  GenParams rule;
  /// Used for compositional examples; `seed` is ignored.
  CompParams compositional;

  bool distractors() const;
  Ordering ordering() const;
  bool operator==(const Distribution& other) const;
};

/// Generates one example of `dist` with the given seed.
Example sample_example(const Distribution& dist, std::uint64_t seed, const Vocabulary& vocab = Vocabulary::standard());

/// Depth and width of the per-rule examples in the rule-accuracy experiments.
GenParams default_rule_params(RuleTag rule);

enum class Regime {
  InDistribution,          // demos drawn from the test distribution
  UnseenRule,              // demos use any rule but the test's
  CompositionalFromRules,  // single-rule demos of each rule in the test proof
  Size,                    // demos smaller in depth or width than the test
  DistractorAblation,      // demos without distractors, in postorder
};

std::string_view to_string(Regime regime);
std::optional<Regime> regime_from_string(std::string_view name);

struct BackendConfig {
  /// http, replay, echo-gold, truncate-gold or mutate-gold.
  std::string type = "echo-gold";
  std::string endpoint;  // full URL of an OpenAI-style completions endpoint
  std::string model;
  /// Name of the environment variable holding the API key; empty for none.
  std::string api_key_env;
  double timeout_seconds = 60;
  std::size_t max_retries = 5;
  double backoff_seconds = 1;
  std::size_t max_concurrency = 4;
  std::size_t max_tokens = 1024;
  std::string replay_path;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Regime regime = Regime::InDistribution;
  Distribution test;
  /// Demo distribution. For the size regime it holds the smaller setting;
  /// for in-distribution runs it must equal `test`.
  Distribution demo;
  std::size_t shots = 8;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  bool broad_grading = true;
  std::size_t parallelism = 1;
  /// Incremental JSONL results; empty keeps results in memory only.
  std::string results_path;
  BackendConfig backend;

  /// Throws ConfigError when the distributions do not fit the regime.
  void validate() const;
};

/// Reads a TOML experiment file. Throws ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::string_view toml_text);

/// Demonstrations for one trial, following the config's regime. `test` is
/// needed by the compositional regime to know which rules it uses.
std::vector<Example> sample_ood_demos(const ExperimentConfig& config, const Example& test, Rng& rng,
                                      const Vocabulary& vocab = Vocabulary::standard());

// ---------------------------------------------------------------------------
// Model clients.

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  /// `test` is the example the prompt ends with; only the test doubles read it.
  virtual std::string complete(const std::string& prompt, const Example& test) = 0;
};

/// Replays recorded {"prompt", "response"} JSONL pairs.
class ReplayClient : public ModelClient {
 public:
  explicit ReplayClient(const std::string& path);
  std::string complete(const std::string& prompt, const Example& test) override;

 private:
  std::map<std::string, std::string> responses_;
};

/// Returns the gold chain of thought.
class EchoGoldClient : public ModelClient {
 public:
  std::string complete(const std::string& prompt, const Example& test) override;
};

/// Returns the gold chain of thought without its last sentence.
class TruncateGoldClient : public ModelClient {
 public:
  std::string complete(const std::string& prompt, const Example& test) override;
};

/// Returns the gold chain of thought with its last sentence replaced by a
/// statement about a predicate the example never mentions.
class MutateGoldClient : public ModelClient {
 public:
  explicit MutateGoldClient(const Vocabulary& vocab = Vocabulary::standard()) : vocab_(vocab) {}
  std::string complete(const std::string& prompt, const Example& test) override;

 private:
  const Vocabulary& vocab_;
};

/// OpenAI-style completions over HTTP(S), greedy decoding. Rate limits and
/// server errors are retried with exponential backoff; authentication
/// failures are not.
class HttpClient : public ModelClient {
 public:
  explicit HttpClient(BackendConfig config);
  ~HttpClient() override;
  std::string complete(const std::string& prompt, const Example& test) override;
  /// HTTP requests sent so far, retries included.
  std::size_t attempts() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::unique_ptr<ModelClient> make_client(const BackendConfig& config, const Vocabulary& vocab = Vocabulary::standard());

// ---------------------------------------------------------------------------
// Experiments.

struct TrialResult {
  std::size_t index = 0;
  std::string example_id;
  std::string response;
  EvalReport report;
  bool correct = false;
  /// Set when the backend failed; such trials are left out of the accuracy.
  std::optional<std::string> error;
};

struct RunResult {
  std::vector<TrialResult> trials;
  std::size_t graded = 0;
  std::size_t successes = 0;
  std::size_t errored = 0;
  double proof_accuracy = 0;
  double ci_low = 0;
  double ci_high = 1;
};

/// 95% Wilson score interval. Throws std::invalid_argument when trials = 0
/// or successes > trials.
std::pair<double, double> compute_ci(std::size_t successes, std::size_t trials);

/// Runs every trial: seeded demos and test, prompt, backend, grading. With a
/// results path, trials are appended as they finish and trials already
/// recorded without error are not queried again.
RunResult run_experiment(const ExperimentConfig& config, ModelClient& client,
                         const Vocabulary& vocab = Vocabulary::standard());
RunResult run_experiment(const ExperimentConfig& config, const Vocabulary& vocab = Vocabulary::standard());

/// The demos and test example of one trial.
struct Trial {
  std::vector<Example> demos;
  Example test;
};
Trial make_trial(const ExperimentConfig& config, std::size_t index, const Vocabulary& vocab = Vocabulary::standard());

// ---------------------------------------------------------------------------
// Offline grading and score tables.

/// Cell label of an example, e.g. "implication_elimination/d2/w1" or
/// "compositional/m2/r3", with "/distractors" appended when present.
std::string group_label(const Example& example);

/// Grades {"id", "prediction"} records (or {"id", "chain_of_thought": [...]})
/// against a dataset. One report record per prediction; throws DatasetError
/// on unknown ids or malformed lines.
std::vector<nlohmann::ordered_json> evaluate_predictions(const std::vector<Example>& dataset, std::istream& predictions,
                                                         bool broad_grading = true,
                                                         const Vocabulary& vocab = Vocabulary::standard());

struct ScoreRow {
  std::string group;
  std::size_t graded = 0;
  std::size_t successes = 0;
  std::size_t errored = 0;
  double accuracy = 0;
  double ci_low = 0;
  double ci_high = 1;
};

/// Aggregates report or results JSONL by its "experiment" or "group" field.
/// For results files only the last record of each trial counts.
std::vector<ScoreRow> score_results(std::istream& records);

}  // namespace deduce
