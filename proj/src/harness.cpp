#include "deduce/harness.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>
#include <toml.hpp>

#include "deduce/compgen.hpp"
#include "deduce/language.hpp"
#include "deduce/rulegen.hpp"

namespace deduce {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Dataset

namespace {

// Proof steps in postorder; premises refer to earlier indices.
void flatten(const ProofTree& t, ordered_json& steps) {
  std::vector<std::size_t> premises;
  for (const auto& p : t.premises) {
    flatten(p, steps);
    premises.push_back(steps.size() - 1);
  }
  ordered_json step;
  step["rule"] = to_string(t.rule);
  step["conclusion"] = t.conclusion.to_sexpr();
  step["premises"] = premises;
  step["hypothetical"] = t.hypothetical;
  step["discharged"] = json::array();
  for (const auto& d : t.discharged) step["discharged"].push_back(d.to_sexpr());
  steps.push_back(std::move(step));
}

std::vector<std::string> sexprs(const std::vector<LogicalForm>& forms) {
  std::vector<std::string> out;
  for (const auto& f : forms) out.push_back(f.to_sexpr());
  return out;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw DatasetError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DatasetError(std::string("field '") + key + "' has the wrong type");
  }
}

LogicalForm form(const std::string& text) {
  try {
    return parse_sexpr(text);
  } catch (const std::exception& e) {
    throw DatasetError("bad logical form '" + text + "': " + e.what());
  }
}

std::vector<LogicalForm> forms(const json& j, const char* key) {
  std::vector<LogicalForm> out;
  for (const auto& s : field<std::vector<std::string>>(j, key)) out.push_back(form(s));
  return out;
}

RuleTag rule_tag(const std::string& name) {
  auto tag = rule_tag_from_string(name);
  if (!tag) throw DatasetError("unknown rule '" + name + "'");
  return *tag;
}

ProofTree unflatten(const json& steps) {
  if (!steps.is_array() || steps.empty()) throw DatasetError("proof_steps must be a non-empty array");
  std::vector<std::optional<ProofTree>> built;
  for (const auto& s : steps) {
    std::vector<ProofTree> premises;
    for (auto i : field<std::vector<std::size_t>>(s, "premises")) {
      if (i >= built.size() || !built[i]) throw DatasetError("proof step refers to a later or reused step");
      premises.push_back(std::move(*built[i]));
      built[i].reset();
    }
    built.push_back(ProofTree{rule_tag(field<std::string>(s, "rule")), form(field<std::string>(s, "conclusion")),
                              std::move(premises), field<bool>(s, "hypothetical"), forms(s, "discharged")});
  }
  for (std::size_t i = 0; i + 1 < built.size(); ++i)
    if (built[i]) throw DatasetError("proof steps do not form a single tree");
  return std::move(*built.back());
}

}  // namespace

ordered_json example_to_json(const Example& ex) {
  ordered_json j;
  j["id"] = ex.id;
  j["kind"] = to_string(ex.kind);
  j["rule"] = to_string(ex.params.rule);
  j["depth"] = ex.params.depth;
  j["width"] = ex.params.width;
  j["min_depth"] = ex.min_depth;
  j["num_rule_types"] = ex.num_rule_types;
  j["distractors"] = ex.params.distractors;
  j["ordering"] = to_string(ex.params.ordering);
  j["seed"] = ex.params.seed;
  j["question"] = ex.question;
  j["query"] = ex.query_text;
  j["chain_of_thought"] = ex.chain_of_thought;
  ordered_json lf;
  lf["axioms"] = sexprs(ex.theory);
  lf["distractors"] = sexprs(ex.distractors);
  lf["query"] = ex.query.to_sexpr();
  lf["proof_steps"] = ordered_json::array();
  flatten(ex.gold_proof, lf["proof_steps"]);
  j["logical_forms"] = std::move(lf);
  return j;
}

Example example_from_json(const json& j) {
  if (!j.is_object()) throw DatasetError("record is not an object");
  auto kind_name = field<std::string>(j, "kind");
  ExampleKind kind;
  if (kind_name == "rule")
    kind = ExampleKind::Rule;
  else if (kind_name == "compositional")
    kind = ExampleKind::Compositional;
  else
    throw DatasetError("unknown kind '" + kind_name + "'");
  auto ordering = ordering_from_string(field<std::string>(j, "ordering"));
  if (!ordering) throw DatasetError("unknown ordering");

  GenParams params;
  params.rule = rule_tag(field<std::string>(j, "rule"));
  params.depth = field<std::size_t>(j, "depth");
  params.width = field<std::size_t>(j, "width");
  params.seed = field<std::uint64_t>(j, "seed");
  params.distractors = field<bool>(j, "distractors");
  params.ordering = *ordering;

  const json lf = field<json>(j, "logical_forms");
  return Example{field<std::string>(j, "id"),
                 kind,
                 params,
                 field<std::size_t>(j, "min_depth"),
                 field<std::size_t>(j, "num_rule_types"),
                 forms(lf, "axioms"),
                 form(field<std::string>(lf, "query")),
                 unflatten(field<json>(lf, "proof_steps")),
                 lf.contains("distractors") ? forms(lf, "distractors") : std::vector<LogicalForm>{},
                 field<std::vector<std::string>>(j, "question"),
                 field<std::string>(j, "query"),
                 field<std::vector<std::string>>(j, "chain_of_thought")};
}

void write_dataset(std::ostream& out, const std::vector<Example>& examples) {
  for (const auto& ex : examples) out << example_to_json(ex).dump() << '\n';
}

void write_dataset(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path);
  write_dataset(out, examples);
  if (!out) throw DatasetError("write failed: " + path);
}

std::vector<Example> read_dataset(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      out.push_back(example_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DatasetError(std::string("malformed JSON: ") + e.what(), n);
    } catch (const DatasetError& e) {
      throw DatasetError(e.what(), n);
    }
  }
  return out;
}

std::vector<Example> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path);
  return read_dataset(in);
}

// ---------------------------------------------------------------------------
// Prompts and distributions

namespace {

void question_block(std::string& out, const Example& ex) {
  out += "Q: ";
  out += join_sentences(ex.question);
  out += " Prove: ";
  out += ex.query_text;
  out += "\nA:";
}

}  // namespace

std::string build_prompt(const std::vector<Example>& demos, const Example& test) {
  std::string out;
  for (const auto& d : demos) {
    question_block(out, d);
    out += ' ';
    out += join_sentences(d.chain_of_thought);
    out += "\n\n";
  }
  question_block(out, test);
  return out;
}

bool Distribution::distractors() const {
  return kind == ExampleKind::Rule ? rule.distractors : compositional.distractors;
}

Ordering Distribution::ordering() const { return kind == ExampleKind::Rule ? rule.ordering : compositional.ordering; }

bool Distribution::operator==(const Distribution& o) const {
  if (kind != o.kind) return false;
  if (kind == ExampleKind::Rule)
    return rule.rule == o.rule.rule && rule.depth == o.rule.depth && rule.width == o.rule.width &&
           rule.distractors == o.rule.distractors && rule.ordering == o.rule.ordering;
  return compositional.min_depth == o.compositional.min_depth &&
         compositional.num_rule_types == o.compositional.num_rule_types &&
         compositional.entity == o.compositional.entity && compositional.distractors == o.compositional.distractors &&
         compositional.ordering == o.compositional.ordering;
}

Example sample_example(const Distribution& dist, std::uint64_t seed, const Vocabulary& vocab) {
  if (dist.kind == ExampleKind::Rule) {
    GenParams p = dist.rule;
    p.seed = seed;
    return generate_rule_example(p, vocab);
  }
  CompParams p = dist.compositional;
  p.seed = seed;
  return generate_compositional_example(p, vocab);
}

GenParams default_rule_params(RuleTag rule) {
  GenParams p;
  p.rule = rule;
  switch (rule) {
    case RuleTag::ImplicationElim: p.depth = 2, p.width = 1; break;
    case RuleTag::ConjIntro:
    case RuleTag::ConjElim:
    case RuleTag::DisjIntro: p.depth = 2, p.width = 3; break;
    case RuleTag::DisjElim: p.depth = 1, p.width = 3; break;
    case RuleTag::ProofByContradiction: p.depth = 1, p.width = 2; break;
    default: throw std::invalid_argument("not a deduction rule: " + std::string(to_string(rule)));
  }
  return p;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::InDistribution: return "in_distribution";
    case Regime::UnseenRule: return "unseen_rule";
    case Regime::CompositionalFromRules: return "compositional_from_rules";
    case Regime::Size: return "size";
    case Regime::DistractorAblation: return "distractor_ablation";
  }
  return "in_distribution";
}

std::optional<Regime> regime_from_string(std::string_view name) {
  for (auto r : {Regime::InDistribution, Regime::UnseenRule, Regime::CompositionalFromRules, Regime::Size,
                 Regime::DistractorAblation})
    if (to_string(r) == name) return r;
  return std::nullopt;
}

namespace {

Distribution ablation_demo(Distribution d) {
  d.rule.distractors = d.compositional.distractors = false;
  d.rule.ordering = d.compositional.ordering = Ordering::Postorder;
  return d;
}

void check_distribution(const Distribution& d, const char* side) {
  try {
    if (d.kind == ExampleKind::Rule) {
      validate(d.rule);
    } else {
      const auto& c = d.compositional;
      if (c.min_depth < 1) throw GenerationError("min_depth must be at least 1");
      if (c.num_rule_types < 1 || c.num_rule_types > deduction_rules().size())
        throw GenerationError("rule_types must lie in 1..6");
    }
  } catch (const GenerationError& e) {
    throw ConfigError(std::string(side) + ": " + e.what());
  }
}

// Single-rule demo carrying the demo side's presentation settings.
Example rule_demo(RuleTag rule, const Distribution& style, Rng& rng, const Vocabulary& vocab) {
  GenParams p = default_rule_params(rule);
  p.distractors = style.distractors();
  p.ordering = style.ordering();
  p.seed = rng.next();
  return generate_rule_example(p, vocab);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  check_distribution(test, "test");
  switch (regime) {
    case Regime::InDistribution:
      if (!(demo == test)) throw ConfigError("in_distribution: demo distribution must equal the test distribution");
      break;
    case Regime::UnseenRule:
      if (test.kind != ExampleKind::Rule) throw ConfigError("unseen_rule: the test must be a rule example");
      break;
    case Regime::CompositionalFromRules:
      if (test.kind != ExampleKind::Compositional)
        throw ConfigError("compositional_from_rules: the test must be compositional");
      break;
    case Regime::Size:
      check_distribution(demo, "demo");
      if (test.kind != ExampleKind::Rule || demo.kind != ExampleKind::Rule || test.rule.rule != demo.rule.rule)
        throw ConfigError("size: test and demo must be rule examples of the same rule");
      if (demo.rule.depth > test.rule.depth || demo.rule.width > test.rule.width)
        throw ConfigError("size: demos may not be deeper or wider than the test");
      break;
    case Regime::DistractorAblation:
      if (!test.distractors()) throw ConfigError("distractor_ablation: the test must have distractors");
      if (!(demo == ablation_demo(test)))
        throw ConfigError("distractor_ablation: demos must be the test setting without distractors, in postorder");
      break;
  }
}

std::vector<Example> sample_ood_demos(const ExperimentConfig& config, const Example& test, Rng& rng,
                                      const Vocabulary& vocab) {
  std::vector<Example> demos;
  switch (config.regime) {
    case Regime::InDistribution:
    case Regime::Size:
    case Regime::DistractorAblation:
      for (std::size_t i = 0; i < config.shots; ++i) demos.push_back(sample_example(config.demo, rng.next(), vocab));
      break;
    case Regime::UnseenRule: {
      if (test.kind != ExampleKind::Rule) throw ConfigError("unseen_rule: the test must be a rule example");
      std::vector<RuleTag> others;
      for (auto r : deduction_rules())
        if (r != test.params.rule) others.push_back(r);
      for (std::size_t i = 0; i < config.shots; ++i) demos.push_back(rule_demo(rng.pick(others), config.demo, rng, vocab));
      break;
    }
    case Regime::CompositionalFromRules: {
      if (test.kind != ExampleKind::Compositional)
        throw ConfigError("compositional_from_rules: the test must be compositional");
      auto used = tree_metrics(test.gold_proof).rule_types;
      std::vector<RuleTag> rules(used.begin(), used.end());
      // Round robin so every rule of the test appears, then shuffle.
      for (std::size_t i = 0; i < config.shots; ++i)
        demos.push_back(rule_demo(rules[i % rules.size()], config.demo, rng, vocab));
      rng.shuffle(demos);
      break;
    }
  }
  return demos;
}

Trial make_trial(const ExperimentConfig& config, std::size_t index, const Vocabulary& vocab) {
  Rng rng = Rng(config.seed).derive(index);
  Example test = sample_example(config.test, rng.next(), vocab);
  auto demos = sample_ood_demos(config, test, rng, vocab);
  return {std::move(demos), std::move(test)};
}

// ---------------------------------------------------------------------------
// Configuration files

namespace {

template <typename T>
T get_or(const toml::table& t, const char* key, T fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n->value<std::string>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = n->value<bool>()) return *v;
  } else if constexpr (std::is_floating_point_v<T>) {
    if (auto v = n->value<double>()) return *v;
  } else {
    if (auto v = n->value<std::int64_t>(); v && *v >= 0) return static_cast<T>(*v);
  }
  throw ConfigError(std::string("key '") + key + "' has the wrong type");
}

Distribution parse_distribution(const toml::table& t) {
  Distribution d;
  auto kind = get_or<std::string>(t, "kind", "rule");
  auto ordering_name = get_or<std::string>(t, "ordering", "random");
  auto ordering = ordering_from_string(ordering_name);
  if (!ordering) throw ConfigError("unknown ordering '" + ordering_name + "'");
  bool distractors = get_or<bool>(t, "distractors", false);
  if (kind == "rule") {
    auto name = get_or<std::string>(t, "rule", "implication_elimination");
    auto rule = rule_tag_from_string(name);
    if (!rule) throw ConfigError("unknown rule '" + name + "'");
    d.kind = ExampleKind::Rule;
    GenParams defaults = default_rule_params(*rule);
    d.rule.rule = *rule;
    d.rule.depth = get_or<std::size_t>(t, "depth", defaults.depth);
    d.rule.width = get_or<std::size_t>(t, "width", defaults.width);
    d.rule.distractors = distractors;
    d.rule.ordering = *ordering;
  } else if (kind == "compositional") {
    d.kind = ExampleKind::Compositional;
    d.compositional.min_depth = get_or<std::size_t>(t, "min_depth", 1);
    d.compositional.num_rule_types = get_or<std::size_t>(t, "rule_types", 1);
    d.compositional.entity = get_or<std::string>(t, "entity", "");
    d.compositional.distractors = distractors;
    d.compositional.ordering = *ordering;
  } else {
    throw ConfigError("unknown example kind '" + kind + "'");
  }
  return d;
}

const toml::table& table(const toml::table& root, const char* key) {
  static const toml::table empty;
  const toml::node* n = root.get(key);
  if (!n) return empty;
  if (!n->is_table()) throw ConfigError(std::string("'") + key + "' must be a table");
  return *n->as_table();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  ExperimentConfig c;
  c.name = get_or<std::string>(root, "name", c.name);
  auto regime_name = get_or<std::string>(root, "regime", "in_distribution");
  auto regime = regime_from_string(regime_name);
  if (!regime) throw ConfigError("unknown regime '" + regime_name + "'");
  c.regime = *regime;
  c.shots = get_or<std::size_t>(root, "shots", c.shots);
  c.trials = get_or<std::size_t>(root, "trials", c.trials);
  c.seed = get_or<std::uint64_t>(root, "seed", c.seed);
  c.broad_grading = get_or<bool>(root, "broad_grading", c.broad_grading);
  c.parallelism = get_or<std::size_t>(root, "parallelism", c.parallelism);
  c.results_path = get_or<std::string>(root, "results", "");

  if (!root.get("test")) throw ConfigError("missing [test] table");
  c.test = parse_distribution(table(root, "test"));
  if (root.get("demo"))
    c.demo = parse_distribution(table(root, "demo"));
  else if (c.regime == Regime::DistractorAblation)
    c.demo = ablation_demo(c.test);
  else if (c.regime == Regime::Size)
    throw ConfigError("size: missing [demo] table");
  else
    c.demo = c.test;

  const auto& b = table(root, "backend");
  auto& be = c.backend;
  be.type = get_or<std::string>(b, "type", be.type);
  be.endpoint = get_or<std::string>(b, "endpoint", be.endpoint);
  be.model = get_or<std::string>(b, "model", be.model);
  be.api_key_env = get_or<std::string>(b, "api_key_env", be.api_key_env);
  be.timeout_seconds = get_or<double>(b, "timeout_seconds", be.timeout_seconds);
  be.max_retries = get_or<std::size_t>(b, "max_retries", be.max_retries);
  be.backoff_seconds = get_or<double>(b, "backoff_seconds", be.backoff_seconds);
  be.max_concurrency = get_or<std::size_t>(b, "max_concurrency", be.max_concurrency);
  be.max_tokens = get_or<std::size_t>(b, "max_tokens", be.max_tokens);
  be.replay_path = get_or<std::string>(b, "replay", be.replay_path);

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// Model clients

ReplayClient::ReplayClient(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot read replay file " + path);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      responses_[j.at("prompt").get<std::string>()] = j.at("response").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError("replay file line " + std::to_string(n) + ": " + e.what());
    }
  }
}

std::string ReplayClient::complete(const std::string& prompt, const Example&) {
  auto it = responses_.find(prompt);
  if (it == responses_.end()) throw BackendError("replay miss");
  return it->second;
}

std::string EchoGoldClient::complete(const std::string&, const Example& test) {
  return join_sentences(test.chain_of_thought);
}

std::string TruncateGoldClient::complete(const std::string&, const Example& test) {
  auto cot = test.chain_of_thought;
  if (!cot.empty()) cot.pop_back();
  return join_sentences(cot);
}

std::string MutateGoldClient::complete(const std::string&, const Example& test) {
  auto cot = test.chain_of_thought;
  auto constants = constants_of(test.query);
  if (cot.empty() || constants.empty()) return join_sentences(cot);
  std::set<std::string> used = predicates_of(test.query);
  for (const auto& f : test.theory)
    for (const auto& p : predicates_of(f)) used.insert(p);
  Rng rng(Rng::hash(test.id));
  PredicatePool pool(rng, vocab_, used);
  cot.back() = render_form(LogicalForm::atom(pool.fresh(), *constants.begin()), vocab_);
  return join_sentences(cot);
}

struct HttpClient::State {
  BackendConfig config;
  std::string base;  // scheme://host[:port]
  std::string path;
  std::counting_semaphore<1 << 16> slots;
  std::atomic<std::size_t> attempts{0};

  explicit State(BackendConfig c)
      : config(std::move(c)), slots(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config.max_concurrency))) {}
};

HttpClient::HttpClient(BackendConfig config) : state_(std::make_unique<State>(std::move(config))) {
  const std::string& url = state_->config.endpoint;
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw BackendError("endpoint must be a full URL");
  auto slash = url.find('/', scheme + 3);
  state_->base = url.substr(0, slash);
  state_->path = slash == std::string::npos ? "/" : url.substr(slash);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) throw BackendError("this build has no TLS support for https endpoints");
#endif
}

HttpClient::~HttpClient() = default;

std::size_t HttpClient::attempts() const { return state_->attempts.load(); }

std::string HttpClient::complete(const std::string& prompt, const Example&) {
  const BackendConfig& cfg = state_->config;
  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key) throw BackendError("API key variable " + cfg.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  ordered_json body;
  if (!cfg.model.empty()) body["model"] = cfg.model;
  body["prompt"] = prompt;
  body["max_tokens"] = cfg.max_tokens;
  body["temperature"] = 0;
  body["stop"] = {"\nQ:", "\n\n"};
  const std::string payload = body.dump();

  auto seconds = std::chrono::duration<double>(cfg.timeout_seconds);
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(seconds);
  std::string last = "no attempt";
  for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      auto wait = std::chrono::duration<double>(cfg.backoff_seconds * std::pow(2.0, double(attempt - 1)));
      std::this_thread::sleep_for(wait);
    }
    httplib::Result res;
    {
      state_->slots.acquire();
      ++state_->attempts;
      httplib::Client cli(state_->base);
      cli.set_connection_timeout(timeout);
      cli.set_read_timeout(timeout);
      cli.set_write_timeout(timeout);
      res = cli.Post(state_->path, headers, payload, "application/json");
      state_->slots.release();
    }
    if (!res) {
      last = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw BackendError("authentication failed (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500) {
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw BackendError("HTTP " + std::to_string(res->status));
    try {
      auto j = json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      if (choice.contains("text")) return choice.at("text").get<std::string>();
      return choice.at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("unexpected response body: ") + e.what());
    }
  }
  throw BackendError("gave up after " + std::to_string(cfg.max_retries + 1) + " attempts, last: " + last);
}

std::unique_ptr<ModelClient> make_client(const BackendConfig& config, const Vocabulary& vocab) {
  if (config.type == "http") return std::make_unique<HttpClient>(config);
  if (config.type == "replay") return std::make_unique<ReplayClient>(config.replay_path);
  if (config.type == "echo-gold") return std::make_unique<EchoGoldClient>();
  if (config.type == "truncate-gold") return std::make_unique<TruncateGoldClient>();
  if (config.type == "mutate-gold") return std::make_unique<MutateGoldClient>(vocab);
  throw ConfigError("unknown backend '" + config.type + "'");
}

// ---------------------------------------------------------------------------
// Experiments

std::pair<double, double> compute_ci(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("compute_ci: no trials");
  if (successes > trials) throw std::invalid_argument("compute_ci: more successes than trials");
  constexpr double z = 1.959963984540054;
  const double n = double(trials);
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  double low = std::max(0.0, center - half), high = std::min(1.0, center + half);
  // Rounding must not push the bounds past the point estimate.
  return {std::min(low, p), std::max(high, p)};
}

namespace {

ordered_json trial_record(const ExperimentConfig& config, const TrialResult& t) {
  ordered_json j;
  j["experiment"] = config.name;
  j["trial"] = t.index;
  j["id"] = t.example_id;
  if (t.error) {
    j["error"] = *t.error;
  } else {
    j["correct"] = t.correct;
    j["overall_correct"] = t.report.overall_correct;
    j["strict_correct"] = t.report.strict_correct;
    j["response"] = t.response;
  }
  return j;
}

// Successful trials already on disk, keyed by trial index.
std::map<std::size_t, json> completed_trials(const std::string& path) {
  std::map<std::size_t, json> done;
  std::ifstream in(path, std::ios::binary);
  if (!in) return done;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      // A run killed mid-append leaves a partial last line.
      std::cerr << "warning: " << path << " line " << n << " is unreadable; ignored\n";
      continue;
    }
    if (!j.contains("trial") || !j.contains("response")) continue;
    auto index = j["trial"].get<std::size_t>();
    done[index] = std::move(j);
  }
  return done;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, ModelClient& client, const Vocabulary& vocab) {
  config.validate();
  std::map<std::size_t, json> done;
  if (!config.results_path.empty()) done = completed_trials(config.results_path);

  std::ofstream log;
  if (!config.results_path.empty()) {
    log.open(config.results_path, std::ios::app | std::ios::binary);
    if (!log) throw std::runtime_error("cannot append to " + config.results_path);
  }

  RunResult result;
  result.trials.resize(config.trials);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        Trial trial = make_trial(config, i, vocab);
        TrialResult t;
        t.index = i;
        t.example_id = trial.test.id;
        bool fresh = true;
        if (auto it = done.find(i); it != done.end()) {
          if (it->second.value("id", "") != t.example_id)
            throw ConfigError("results file " + config.results_path + " was written by a different configuration");
          t.response = it->second["response"].get<std::string>();
          fresh = false;
        } else {
          try {
            t.response = client.complete(build_prompt(trial.demos, trial.test), trial.test);
          } catch (const BackendError& e) {
            t.error = e.what();
          }
        }
        if (!t.error) {
          t.report = score_example(trial.test, t.response, vocab);
          t.correct = config.broad_grading ? t.report.overall_correct : t.report.strict_correct;
        }
        std::lock_guard lock(mu);
        if (fresh && log.is_open()) log << trial_record(config, t).dump() << '\n' << std::flush;
        result.trials[i] = std::move(t);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };

  const std::size_t workers = std::min(config.parallelism, config.trials);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& t : result.trials) {
    if (t.error) {
      ++result.errored;
      continue;
    }
    ++result.graded;
    if (t.correct) ++result.successes;
  }
  if (result.errored)
    std::cerr << "warning: " << result.errored << " of " << config.trials
              << " trials failed at the backend and are excluded\n";
  if (result.graded) {
    result.proof_accuracy = double(result.successes) / double(result.graded);
    std::tie(result.ci_low, result.ci_high) = compute_ci(result.successes, result.graded);
  }
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, const Vocabulary& vocab) {
  auto client = make_client(config.backend, vocab);
  return run_experiment(config, *client, vocab);
}

// ---------------------------------------------------------------------------
// Offline grading

std::string group_label(const Example& ex) {
  std::string out;
  if (ex.kind == ExampleKind::Rule)
    out = std::string(to_string(ex.params.rule)) + "/d" + std::to_string(ex.params.depth) + "/w" +
          std::to_string(ex.params.width);
  else
    out = "compositional/m" + std::to_string(ex.min_depth) + "/r" + std::to_string(ex.num_rule_types);
  if (ex.params.distractors) out += "/distractors";
  return out;
}

std::vector<ordered_json> evaluate_predictions(const std::vector<Example>& dataset, std::istream& predictions,
                                               bool broad_grading, const Vocabulary& vocab) {
  std::map<std::string, const Example*> by_id;
  for (const auto& ex : dataset) by_id[ex.id] = &ex;
  std::vector<ordered_json> out;
  std::string line;
  for (std::size_t n = 1; std::getline(predictions, line); ++n) {
    if (line.empty()) continue;
    json j;
    std::string id, text;
    try {
      j = json::parse(line);
      id = j.at("id").get<std::string>();
      if (j.contains("prediction"))
        text = j["prediction"].get<std::string>();
      else
        text = join_sentences(j.at("chain_of_thought").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      throw DatasetError(std::string("malformed prediction: ") + e.what(), n);
    }
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DatasetError("unknown example id '" + id + "'", n);
    EvalReport report = score_example(*it->second, text, vocab);
    ordered_json r;
    r["group"] = group_label(*it->second);
    r["id"] = id;
    r["correct"] = broad_grading ? report.overall_correct : report.strict_correct;
    r["overall_correct"] = report.overall_correct;
    r["strict_correct"] = report.strict_correct;
    r["steps"] = ordered_json::array();
    for (const auto& s : report.steps) {
      ordered_json step;
      step["index"] = s.index;
      step["classification"] = to_string(s.classification);
      if (s.rule) step["rule"] = to_string(*s.rule);
      r["steps"].push_back(std::move(step));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScoreRow> score_results(std::istream& records) {
  // group -> key -> correct (nullopt for an error); later records win.
  std::map<std::string, std::map<std::string, std::optional<bool>>> groups;
  std::vector<std::string> order;
  std::string line;
  for (std::size_t n = 1; std::getline(records, line); ++n) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(std::string("malformed record: ") + e.what(), n);
    }
    std::string group = j.contains("experiment") ? j["experiment"].get<std::string>() : j.value("group", "all");
    std::string key = j.contains("trial") ? std::to_string(j["trial"].get<std::size_t>()) : j.value("id", "");
    if (key.empty()) key = "#" + std::to_string(n);
    if (!groups.count(group)) order.push_back(group);
    auto& cell = groups[group][key];
    if (j.contains("error"))
      cell = std::nullopt;
    else if (j.contains("correct"))
      cell = j["correct"].get<bool>();
    else
      throw DatasetError("record has neither 'correct' nor 'error'", n);
  }
  std::vector<ScoreRow> rows;
  for (const auto& g : order) {
    ScoreRow row;
    row.group = g;
    for (const auto& [key, v] : groups[g]) {
      if (!v) {
        ++row.errored;
        continue;
      }
      ++row.graded;
      if (*v) ++row.successes;
    }
    if (row.graded) {
      row.accuracy = double(row.successes) / double(row.graded);
      std::tie(row.ci_low, row.ci_high) = compute_ci(row.successes, row.graded);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace deduce
