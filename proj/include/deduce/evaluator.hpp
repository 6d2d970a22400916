#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/example.hpp"
#include "deduce/language.hpp"
#include "deduce/logic.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

enum class StepClass { Axiom, StrictlyValid, BroadlyValid, Invalid, ContradictionMarker, Assumption };

std::string_view to_string(StepClass c);

struct StepVerdict {
  std::size_t index = 0;
  std::string sentence;
  /// Parse of the sentence (for a contradiction marker, the contradicted
  /// fact); empty on parse failure.
  std::optional<LogicalForm> form;
  bool parsed = false;
  StepClass classification = StepClass::Invalid;
  /// Deduction rule that justified the step. Empty for invalid steps,
  /// markers, and restatements of an earlier conclusion.
  std::optional<RuleTag> rule;
  std::vector<LogicalForm> premises;
  std::vector<LogicalForm> discharged;
  /// Axioms consumed, or -1 when no rule applies.
  int k = -1;
};

struct EvalReport {
  std::vector<StepVerdict> steps;
  /// A conclusion equivalent to the goal was derived with no open hypotheses.
  bool overall_correct = false;
  /// Same, with modus tollens and transitivity disabled.
  bool strict_correct = false;
  bool goal_parsed = false;
  std::size_t context_parse_failures = 0;
};

struct EvalOptions {
  /// Accept modus tollens and transitivity of universal rules.
  bool broad = true;
};

/// Checks a chain of thought against a context and a goal, all given as
/// sentences.
EvalReport evaluate_cot(const std::vector<std::string>& context, const std::vector<std::string>& cot,
                        const std::string& goal, const Vocabulary& vocab = Vocabulary::standard());

/// Core of `evaluate_cot` over already-parsed input, for a single rule set.
/// `verdicts` receives one entry per CoT sentence; returns goal membership.
bool evaluate_parsed(const std::vector<LogicalForm>& axioms, const std::vector<ParsedSentence>& cot,
                     const LogicalForm& goal, EvalOptions options, std::vector<StepVerdict>* verdicts = nullptr);

/// Splits `predicted_cot` into sentences and grades it against the example's
/// rendered question and query.
EvalReport score_example(const Example& example, std::string_view predicted_cot,
                         const Vocabulary& vocab = Vocabulary::standard());

}  // namespace deduce
