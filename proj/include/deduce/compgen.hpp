#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deduce/example.hpp"
#include "deduce/logic.hpp"
#include "deduce/rng.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

/// One family of admissible conclusions about a single entity.
struct ConclusionPattern {
  enum class Kind {
    Any,          // every form
    Exact,        // exactly `form`
    Negated,      // any negated atom
    Conjunction,  // conjunctions of `arity` atoms whose operand `slot` matches `inner`
    Disjunction,  // disjunctions of `arity` atoms
  };
  Kind kind = Kind::Any;
  std::optional<LogicalForm> form;
  std::size_t arity = 3;
  std::size_t slot = 0;
  std::shared_ptr<const ConclusionPattern> inner;

  static ConclusionPattern any() { return {}; }
  static ConclusionPattern exact(LogicalForm f) {
    ConclusionPattern p;
    p.kind = Kind::Exact;
    p.form = std::move(f);
    return p;
  }
  static ConclusionPattern negated() {
    ConclusionPattern p;
    p.kind = Kind::Negated;
    return p;
  }
  static ConclusionPattern conjunction(std::size_t arity, std::size_t slot, ConclusionPattern inner);
  static ConclusionPattern disjunction(std::size_t arity) {
    ConclusionPattern p;
    p.kind = Kind::Disjunction;
    p.arity = arity;
    return p;
  }

  bool matches(const LogicalForm& phi) const;
};

/// Set of admissible conclusions: the union of its patterns. The universe is
/// the single `Any` pattern.
struct ConclusionConstraint {
  std::vector<ConclusionPattern> patterns;

  static ConclusionConstraint universe() { return {{ConclusionPattern::any()}}; }
  static ConclusionConstraint exactly(std::vector<LogicalForm> forms);
  static ConclusionConstraint negated() { return {{ConclusionPattern::negated()}}; }

  bool empty() const { return patterns.empty(); }
  bool matches(const LogicalForm& phi) const;
};

/// Raised when a retry budget runs out.
class RetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform choice among the admissible forms of minimal nesting depth whose
/// atoms are predicates applied to `entity`. Unconstrained atoms take fresh
/// predicates from `pool`. Throws std::invalid_argument on an empty
/// constraint.
LogicalForm sample_conclusion(const ConclusionConstraint& constraint, const std::string& entity, PredicatePool& pool,
                              Rng& rng);

/// Recursive generation of a compositional proof of requested `depth` whose
/// conclusion satisfies `constraint`, never using a rule in `disallowed`.
/// `hypothetical` marks a proof inside a Suppose block. Throws RetryExhausted
/// when an inner loop gives up, VocabularyExhausted when predicates run out.
ProofTree generate_compositional_proof(const ConclusionConstraint& constraint, const std::set<RuleTag>& disallowed,
                                       std::size_t depth, const std::string& entity, bool hypothetical,
                                       PredicatePool& pool, Rng& rng);

/// Regenerates until depth >= min_depth, the proof uses exactly
/// num_rule_types rule types and the theory is consistent; then adds
/// distractors if requested and renders the text. Throws GenerationError
/// after 10000 attempts.
Example generate_compositional_example(const CompParams& params, Rng& rng,
                                       const Vocabulary& vocab = Vocabulary::standard());

/// Same, seeded from `params.seed`.
Example generate_compositional_example(const CompParams& params, const Vocabulary& vocab = Vocabulary::standard());

}  // namespace deduce
