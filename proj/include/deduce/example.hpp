#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/logic.hpp"

namespace deduce {

enum class Ordering { Random, Postorder };
enum class ExampleKind { Rule, Compositional };

std::string_view to_string(Ordering ordering);
std::optional<Ordering> ordering_from_string(std::string_view name);
std::string_view to_string(ExampleKind kind);

/// Generation parameters of a per-rule example.
struct GenParams {
  RuleTag rule = RuleTag::ImplicationElim;
  /// Number of implication hops on the longest chain.
  std::size_t depth = 1;
  /// Premises (or connective operands) per step.
  std::size_t width = 1;
  std::uint64_t seed = 0;
  bool distractors = false;
  Ordering ordering = Ordering::Random;
};

/// Generation parameters of a compositional example.
struct CompParams {
  std::size_t min_depth = 1;
  std::size_t num_rule_types = 1;
  std::uint64_t seed = 0;
  /// Empty: pick a name with the seeded generator.
  std::string entity;
  bool distractors = false;
  Ordering ordering = Ordering::Random;
};

/// A generated question with its gold proof. Rule-wise and compositional
/// examples share this container.
struct Example {
  std::string id;
  ExampleKind kind = ExampleKind::Rule;
  /// Per-rule parameters; for compositional examples `depth`/`width` hold the
  /// measured proof depth and width.
  GenParams params;
  std::size_t min_depth = 0;
  std::size_t num_rule_types = 0;

  /// Axioms in presentation order (gold axioms and distractors).
  std::vector<LogicalForm> theory;
  LogicalForm query;
  ProofTree gold_proof;
  /// Subset of `theory` added as distractors.
  std::vector<LogicalForm> distractors;

  // Rendered text, filled by `assemble`.
  std::vector<std::string> question;
  std::string query_text;
  std::vector<std::string> chain_of_thought;

  bool distractors_present() const { return !distractors.empty(); }
  Ordering ordering() const { return params.ordering; }
};

bool operator==(const Example& a, const Example& b);

}  // namespace deduce
