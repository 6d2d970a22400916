#pragma once

#include <vector>

#include "deduce/example.hpp"
#include "deduce/logic.hpp"
#include "deduce/rng.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

/// Distractor forms grouped by the gold form they shadow (a gold rule for
/// per-rule examples, the conclusion of a proof step for compositional ones).
struct DistractorPlan {
  struct Entry {
    LogicalForm shadowed;
    std::vector<LogicalForm> forms;
  };
  std::vector<Entry> entries;

  /// Every distractor form, deduplicated, in plan order.
  std::vector<LogicalForm> forms() const;
};

/// Builds distractors for `example` without modifying it. Every predicate in
/// a distractor consequent is fresh, except the gold goal predicate in the
/// proof-by-cases and contradiction patterns, whose antecedents can never be
/// satisfied.
DistractorPlan plan_distractors(const Example& example, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

/// Appends the planned distractors to the theory and records them. Rendered
/// text is cleared; call `assemble` afterwards. Throws std::invalid_argument
/// if the example already has distractors.
Example add_distractors(Example example, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

}  // namespace deduce
