#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "deduce/logic.hpp"

namespace deduce {

/// Result of saturating a theory.
struct Closure {
  std::vector<LogicalForm> facts;
  std::unordered_set<std::string> keys;  // canonical keys of `facts`
  /// False when the step budget ran out before saturation; the facts are then
  /// a sound but partial closure.
  bool complete = true;

  bool contains(const LogicalForm& phi) const { return keys.count(phi.canonical_key()) > 0; }
  /// Some fact and its negation are both present.
  bool inconsistent() const;
};

/// Brute-force prover sharing no code with the evaluator.
///
/// Saturates under implication elimination, conjunction introduction and
/// elimination, disjunction introduction, one level of case splitting over
/// derived disjunctions, and contradiction search: a form is refuted when
/// assuming it leads to some fact together with its negation. Introduction
/// rules only build forms that occur (instantiated) somewhere in the theory or
/// in `targets`, which keeps the closure finite.
Closure forward_chain(const std::vector<LogicalForm>& axioms, std::size_t max_steps = 200000,
                      const std::vector<LogicalForm>& targets = {});

struct Provability {
  bool provable = false;
  /// False if the budget ran out; `provable == false` is then inconclusive.
  bool complete = true;
};

/// Goal membership in the closure, modulo operand order. A universal goal
/// ∀x(ψ→γ) is proved by deriving γ(e) from ψ(e) for a fresh entity e.
Provability provable(const std::vector<LogicalForm>& axioms, const LogicalForm& goal, std::size_t max_steps = 200000);

/// True iff the closure contains no form together with its negation.
bool check_consistency(const std::vector<LogicalForm>& axioms, std::size_t max_steps = 200000);

}  // namespace deduce
