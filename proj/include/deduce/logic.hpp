#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deduce {

/// Raised when a form or proof falls outside the supported fragment.
class FragmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FormKind { Atom, Negation, Conjunction, Disjunction, UniversalImplication };

/// Immutable first-order form restricted to unary predicates over a single
/// constant or the bound variable of one universal implication.
///
/// Conjunctions and disjunctions have at least two operands, each of which is
/// an atom or a negated atom. A universal implication may have one level of
/// conjunction/disjunction in its antecedent and consequent. Negation applies
/// to atoms (and, for totality of `negate`, to universal implications).
class LogicalForm {
 public:
  static LogicalForm atom(std::string predicate, std::string constant);
  static LogicalForm variable_atom(std::string predicate, std::string variable);
  static LogicalForm negation(LogicalForm inner);
  static LogicalForm conjunction(std::vector<LogicalForm> operands);
  static LogicalForm disjunction(std::vector<LogicalForm> operands);
  static LogicalForm universal(std::string variable, LogicalForm antecedent, LogicalForm consequent);

  FormKind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == FormKind::Atom; }
  bool is_negation() const { return kind() == FormKind::Negation; }
  bool is_conjunction() const { return kind() == FormKind::Conjunction; }
  bool is_disjunction() const { return kind() == FormKind::Disjunction; }
  bool is_universal() const { return kind() == FormKind::UniversalImplication; }
  /// Atom or negated atom.
  bool is_literal() const;
  bool is_ground() const;

  // Atom accessors.
  const std::string& predicate() const;
  const std::string& argument() const;
  bool argument_is_variable() const;

  // Negation accessor.
  const LogicalForm& inner() const;

  // Conjunction / disjunction accessor.
  const std::vector<LogicalForm>& operands() const;

  // Universal implication accessors.
  const std::string& variable() const;
  const LogicalForm& antecedent() const;
  const LogicalForm& consequent() const;

  /// Structural s-expression, e.g. `(forall ?x (dog ?x) (mammal ?x))`.
  const std::string& to_sexpr() const { return node_->sexpr; }
  /// Order-insensitive key: operands of every conjunction and disjunction are
  /// sorted, so two forms are `equivalent` iff their keys are equal.
  const std::string& canonical_key() const { return node_->key; }

  friend bool operator==(const LogicalForm& a, const LogicalForm& b) { return a.to_sexpr() == b.to_sexpr(); }
  friend bool operator<(const LogicalForm& a, const LogicalForm& b) { return a.to_sexpr() < b.to_sexpr(); }

 private:
  struct Node {
    FormKind kind;
    std::string predicate;  // atom predicate
    std::string argument;   // atom argument, or bound variable of a universal
    bool variable = false;
    std::vector<LogicalForm> operands;  // children; universal: {antecedent, consequent}
    std::string sexpr;
    std::string key;
  };

  explicit LogicalForm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static LogicalForm make(Node node);

  std::shared_ptr<const Node> node_;
};

/// Precedence-ordered negation: removes a leading negation, pushes negation
/// through disjunction and conjunction by De Morgan, else wraps.
LogicalForm negate(const LogicalForm& phi);

/// Equality modulo reordering of conjuncts and disjuncts at every level.
bool equivalent(const LogicalForm& phi, const LogicalForm& psi);

/// Replaces the free variable `variable` by `entity`. Throws FragmentError if
/// `phi` has a different free variable. Bound variables are left untouched.
LogicalForm substitute(const LogicalForm& phi, std::string_view variable, std::string_view entity);

/// Replaces every occurrence of the constant `entity` by `variable`.
LogicalForm generalize(const LogicalForm& phi, std::string_view entity, std::string_view variable);

std::set<std::string> constants_of(const LogicalForm& phi);
std::set<std::string> predicates_of(const LogicalForm& phi);

/// Parses the output of `LogicalForm::to_sexpr`.
LogicalForm parse_sexpr(std::string_view text);

// ---------------------------------------------------------------------------
// Proofs

enum class RuleTag {
  Axiom,
  ImplicationElim,
  ConjIntro,
  ConjElim,
  DisjIntro,
  DisjElim,
  ProofByContradiction,
  Assumption,
  BroadTransitivity,
  BroadModusTollens,
};

std::string_view to_string(RuleTag tag);
std::optional<RuleTag> rule_tag_from_string(std::string_view name);

/// The six rule types that generated gold proofs can exercise.
const std::vector<RuleTag>& deduction_rules();

struct ProofTree {
  RuleTag rule;
  LogicalForm conclusion;
  std::vector<ProofTree> premises;
  /// True for steps inside a Suppose/Assume block.
  bool hypothetical = false;
  /// Hypotheses closed by this step (DisjElim, ProofByContradiction).
  std::vector<LogicalForm> discharged;

  static ProofTree axiom(LogicalForm conclusion, bool hypothetical = false);
  static ProofTree assumption(LogicalForm conclusion);
  static ProofTree step(RuleTag rule, LogicalForm conclusion, std::vector<ProofTree> premises,
                        bool hypothetical = false, std::vector<LogicalForm> discharged = {});

  bool is_leaf() const { return rule == RuleTag::Axiom || rule == RuleTag::Assumption; }
};

bool operator==(const ProofTree& a, const ProofTree& b);

struct ProofMetrics {
  /// Longest root-to-leaf chain of non-leaf steps.
  std::size_t depth = 0;
  /// Largest premise count of a non-leaf step.
  std::size_t width = 0;
  /// Rule types used, excluding Axiom and Assumption.
  std::set<RuleTag> rule_types;
  /// Largest number of implication-elimination hops on a root-to-leaf chain.
  /// This is the depth parameter of per-rule examples.
  std::size_t hop_depth = 0;
  /// Largest connective arity handled by a step: conjuncts introduced or
  /// eliminated, disjuncts introduced or split on; 1 for implication
  /// elimination and contradiction. This is the width parameter of per-rule
  /// examples.
  std::size_t arity = 0;
};

ProofMetrics tree_metrics(const ProofTree& proof);

/// Distinct axiom leaves in first-occurrence (postorder) order.
std::vector<LogicalForm> proof_axioms(const ProofTree& proof);
/// Distinct assumption leaves in first-occurrence order.
std::vector<LogicalForm> proof_assumptions(const ProofTree& proof);
/// Checks leaf discipline: every Assumption leaf is discharged by exactly one
/// ancestor, and every discharged hypothesis occurs as an assumption below.
bool assumptions_discharged(const ProofTree& proof);

}  // namespace deduce
