#include "deduce/compgen.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include "deduce/distractor.hpp"
#include "deduce/language.hpp"
#include "deduce/oracle.hpp"
#include "deduce/rulegen.hpp"

namespace deduce {

using Kind = ConclusionPattern::Kind;

namespace {

constexpr int kInnerRetries = 100;
constexpr int kOuterRetries = 10000;
const std::string kVar = "x";

std::size_t nesting(const LogicalForm& f) {
  switch (f.kind()) {
    case FormKind::Atom: return 0;
    case FormKind::Negation: return 1 + nesting(f.inner());
    case FormKind::Conjunction:
    case FormKind::Disjunction: {
      std::size_t d = 0;
      for (const auto& op : f.operands()) d = std::max(d, nesting(op));
      return d + 1;
    }
    case FormKind::UniversalImplication: return 1 + std::max(nesting(f.antecedent()), nesting(f.consequent()));
  }
  return 0;
}

std::size_t nesting(const ConclusionPattern& p) {
  switch (p.kind) {
    case Kind::Any: return 0;
    case Kind::Exact: return nesting(*p.form);
    case Kind::Negated: return 1;
    case Kind::Conjunction: return 1 + nesting(*p.inner);
    case Kind::Disjunction: return 1;
  }
  return 0;
}

// Patterns whose instances are literals, and so can be connective operands.
bool literal_pattern(const ConclusionPattern& p) {
  return p.kind == Kind::Any || p.kind == Kind::Negated || (p.kind == Kind::Exact && p.form->is_literal());
}

LogicalForm instantiate(const ConclusionPattern& p, const std::string& e, PredicatePool& pool) {
  auto fresh = [&] { return LogicalForm::atom(pool.fresh(), e); };
  switch (p.kind) {
    case Kind::Any: return fresh();
    case Kind::Exact: return *p.form;
    case Kind::Negated: return LogicalForm::negation(fresh());
    case Kind::Conjunction: {
      std::vector<LogicalForm> ops;
      for (std::size_t i = 0; i < p.arity; ++i) ops.push_back(i == p.slot ? instantiate(*p.inner, e, pool) : fresh());
      return LogicalForm::conjunction(std::move(ops));
    }
    case Kind::Disjunction: {
      std::vector<LogicalForm> ops;
      for (std::size_t i = 0; i < p.arity; ++i) ops.push_back(fresh());
      return LogicalForm::disjunction(std::move(ops));
    }
  }
  throw std::logic_error("unknown pattern");
}

// Operands of a connective, else the form itself, reduced to atoms.
std::set<std::string> operand_atoms(const LogicalForm& f) {
  std::set<std::string> out;
  auto add = [&](const LogicalForm& g) { out.insert((g.is_negation() ? g.inner() : g).canonical_key()); };
  if (f.is_conjunction() || f.is_disjunction())
    for (const auto& op : f.operands()) add(op);
  else
    add(f);
  return out;
}

bool share_operands(const LogicalForm& a, const LogicalForm& b) {
  auto x = operand_atoms(a), y = operand_atoms(b);
  return std::any_of(x.begin(), x.end(), [&](const std::string& k) { return y.count(k) > 0; });
}

// Concrete forms a constraint names; unconstrained patterns name none.
std::vector<LogicalForm> named_forms(const ConclusionConstraint& c) {
  std::vector<LogicalForm> out;
  for (const auto& p : c.patterns) {
    if (p.kind == Kind::Exact) out.push_back(*p.form);
    if (p.kind == Kind::Conjunction && p.inner->kind == Kind::Exact) out.push_back(*p.inner->form);
  }
  return out;
}

void replace_leaf(ProofTree& t, const LogicalForm& f) {
  if (t.rule == RuleTag::Axiom && t.conclusion == f) {
    t = ProofTree::assumption(f);
    return;
  }
  for (auto& p : t.premises) replace_leaf(p, f);
}

class Generator {
 public:
  Generator(const std::string& entity, PredicatePool& pool, Rng& rng) : e_(entity), pool_(pool), rng_(rng) {}

  ProofTree gen(const ConclusionConstraint& C, const std::set<RuleTag>& R, std::size_t d, bool h) {
    if (C.empty()) throw std::invalid_argument("empty conclusion constraint");

    bool has_conj = false, has_disj = false, has_neg = false, open_neg = false, operand_ok = false;
    bool only_conj = true, only_disj = true, negated_operand = false;
    for (const auto& p : C.patterns) {
      const bool conj = p.kind == Kind::Conjunction || (p.kind == Kind::Exact && p.form->is_conjunction());
      const bool disj = p.kind == Kind::Disjunction || (p.kind == Kind::Exact && p.form->is_disjunction());
      has_conj |= conj || p.kind == Kind::Any;
      has_disj |= disj || p.kind == Kind::Any;
      has_neg |= p.kind == Kind::Any || p.kind == Kind::Negated || (p.kind == Kind::Exact && p.form->is_negation());
      open_neg |= p.kind == Kind::Any || p.kind == Kind::Negated;
      operand_ok |= literal_pattern(p);
      only_conj &= conj;
      only_disj &= disj;
      if (p.kind == Kind::Conjunction) negated_operand |= p.inner->kind == Kind::Negated ||
                                                           (p.inner->kind == Kind::Exact && p.inner->form->is_negation());
      if (p.kind == Kind::Exact && (conj || disj))
        for (const auto& op : p.form->operands()) negated_operand |= op.is_negation();
    }
    const bool only_connective = only_conj || only_disj;

    std::set<RuleTag> A;
    for (RuleTag r : deduction_rules())
      if (!R.count(r)) A.insert(r);
    if (!has_conj) A.erase(RuleTag::ConjIntro);
    if (!has_disj) A.erase(RuleTag::DisjIntro);
    // The conclusion ¬s' is chosen inside the branch, so an exact negated
    // target cannot be met.
    if (h || d == 1 || !has_neg || !open_neg) A.erase(RuleTag::ProofByContradiction);
    if (h || d == 1 || only_connective) A.erase(RuleTag::DisjElim);
    if (only_connective || !operand_ok) A.erase(RuleTag::ConjElim);
    if (only_connective && negated_operand) A.erase(RuleTag::ImplicationElim);

    if (d == 0 || A.empty()) return ProofTree::axiom(sample(C), h);

    std::vector<RuleTag> choices(A.begin(), A.end());
    switch (rng_.pick(choices)) {
      case RuleTag::ImplicationElim: return implication(C, d, h);
      case RuleTag::ConjIntro: return conj_intro(C, d, h);
      case RuleTag::ConjElim: return conj_elim(C, d, h);
      case RuleTag::DisjIntro: return disj_intro(C, d, h);
      case RuleTag::DisjElim: return disj_elim(C, d, h);
      case RuleTag::ProofByContradiction: return contradiction(d, h);
      default: throw std::logic_error("unexpected rule");
    }
  }

  LogicalForm sample(const ConclusionConstraint& C) {
    std::size_t best = SIZE_MAX;
    for (const auto& p : C.patterns) best = std::min(best, nesting(p));
    std::vector<const ConclusionPattern*> minimal;
    for (const auto& p : C.patterns)
      if (nesting(p) == best) minimal.push_back(&p);
    return instantiate(*minimal[rng_.below(minimal.size())], e_, pool_);
  }

 private:
  template <typename F>
  auto retry(F&& attempt) {
    for (int i = 0; i < kInnerRetries; ++i)
      if (auto r = attempt()) return std::move(*r);
    throw RetryExhausted("inner retry budget exhausted");
  }

  ProofTree implication(const ConclusionConstraint& C, std::size_t d, bool h) {
    const auto named = named_forms(C);
    ProofTree a = retry([&]() -> std::optional<ProofTree> {
      ProofTree t = gen(ConclusionConstraint::universe(), {}, d - 1, h);
      for (const auto& c : named)
        if (share_operands(t.conclusion, c)) return std::nullopt;
      return t;
    });
    LogicalForm s = retry([&]() -> std::optional<LogicalForm> {
      LogicalForm f = sample(C);
      if (share_operands(a.conclusion, f)) return std::nullopt;
      return f;
    });
    auto rule = LogicalForm::universal(kVar, generalize(a.conclusion, e_, kVar), generalize(s, e_, kVar));
    return ProofTree::step(RuleTag::ImplicationElim, s, {std::move(a), ProofTree::axiom(rule, h)}, h);
  }

  // Target conjunction when C holds only conjunctions of known operands.
  std::optional<LogicalForm> exact_connective(const ConclusionConstraint& C, bool conjunction) {
    std::vector<LogicalForm> forms;
    for (const auto& p : C.patterns)
      if (p.kind == Kind::Exact && (conjunction ? p.form->is_conjunction() : p.form->is_disjunction()))
        forms.push_back(*p.form);
    if (forms.empty()) return std::nullopt;
    return rng_.pick(forms);
  }

  ProofTree conj_intro(const ConclusionConstraint& C, std::size_t d, bool h) {
    bool open = std::any_of(C.patterns.begin(), C.patterns.end(),
                            [](const ConclusionPattern& p) { return p.kind == Kind::Any; });
    std::optional<LogicalForm> target = open ? std::nullopt : exact_connective(C, true);
    if (!open && !target) throw std::logic_error("conjunction introduction without a conjunctive target");
    const std::size_t L = target ? target->operands().size() : 3;

    std::vector<ProofTree> P;
    std::vector<LogicalForm> ops;
    for (std::size_t i = 0; i < L; ++i) {
      auto Ci = target ? ConclusionConstraint::exactly({target->operands()[i]}) : ConclusionConstraint::universe();
      P.push_back(retry([&]() -> std::optional<ProofTree> {
        ProofTree a = gen(Ci, {RuleTag::ConjElim}, d - 1, h);
        if (!a.conclusion.is_literal()) return std::nullopt;
        for (const auto& o : ops)
          if (share_operands(o, a.conclusion)) return std::nullopt;
        if (target)
          for (std::size_t j = 0; j < L; ++j)
            if (j != i && equivalent(target->operands()[j], a.conclusion)) return std::nullopt;
        return a;
      }));
      ops.push_back(P.back().conclusion);
    }
    return ProofTree::step(RuleTag::ConjIntro, LogicalForm::conjunction(ops), std::move(P), h);
  }

  ProofTree conj_elim(const ConclusionConstraint& C, std::size_t d, bool h) {
    const std::size_t i = rng_.below(3);
    ConclusionConstraint Cp;
    for (const auto& p : C.patterns)
      if (literal_pattern(p)) Cp.patterns.push_back(ConclusionPattern::conjunction(3, i, p));
    ProofTree a = retry([&]() -> std::optional<ProofTree> {
      ProofTree t = gen(Cp, {RuleTag::ConjIntro}, d - 1, h);
      const auto& c = t.conclusion;
      if (!c.is_conjunction() || c.operands().size() != 3) return std::nullopt;
      for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = x + 1; y < 3; ++y)
          if (share_operands(c.operands()[x], c.operands()[y])) return std::nullopt;
      return t;
    });
    LogicalForm concl = a.conclusion.operands()[i];
    return ProofTree::step(RuleTag::ConjElim, concl, {std::move(a)}, h);
  }

  ProofTree disj_intro(const ConclusionConstraint& C, std::size_t d, bool h) {
    // Disjunctive members of C; the universe contributes 3-way disjunctions.
    std::vector<ConclusionPattern> disj;
    for (const auto& p : C.patterns) {
      if (p.kind == Kind::Any) disj.push_back(ConclusionPattern::disjunction(3));
      if (p.kind == Kind::Disjunction || (p.kind == Kind::Exact && p.form->is_disjunction())) disj.push_back(p);
    }
    const ConclusionPattern target = rng_.pick(disj);
    const std::size_t n = target.kind == Kind::Exact ? target.form->operands().size() : target.arity;
    const std::size_t i = rng_.below(n);
    auto Ci = target.kind == Kind::Exact ? ConclusionConstraint::exactly({target.form->operands()[i]})
                                         : ConclusionConstraint::universe();

    ProofTree a = retry([&]() -> std::optional<ProofTree> {
      ProofTree t = gen(Ci, {RuleTag::DisjElim}, d - 1, h);
      if (!t.conclusion.is_literal()) return std::nullopt;
      if (target.kind == Kind::Exact)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i && share_operands(target.form->operands()[j], t.conclusion)) return std::nullopt;
      return t;
    });

    LogicalForm x = retry([&]() -> std::optional<LogicalForm> {
      if (target.kind == Kind::Exact) return *target.form;
      std::vector<LogicalForm> ops;
      for (std::size_t j = 0; j < n; ++j)
        ops.push_back(j == i ? a.conclusion : LogicalForm::atom(pool_.fresh(), e_));
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && share_operands(ops[j], a.conclusion)) return std::nullopt;
      return LogicalForm::disjunction(std::move(ops));
    });
    return ProofTree::step(RuleTag::DisjIntro, x, {std::move(a)}, h);
  }

  static std::vector<LogicalForm> ground_literal_axioms(const ProofTree& t) {
    std::vector<LogicalForm> out;
    for (const auto& f : proof_axioms(t))
      if (f.is_literal()) out.push_back(f);
    return out;
  }

  ProofTree disj_elim(const ConclusionConstraint& C, std::size_t d, bool h) {
    // The first case fixes the conclusion; the second must reach the same.
    std::vector<ProofTree> cases;
    std::vector<std::vector<LogicalForm>> unique;
    while (cases.size() < 2) {
      auto Ck = cases.empty() ? C : ConclusionConstraint::exactly({cases[0].conclusion});
      ProofTree p = retry([&]() -> std::optional<ProofTree> {
        ProofTree t = gen(Ck, {RuleTag::DisjIntro}, d - 1, true);
        if (t.conclusion.is_conjunction() || t.conclusion.is_disjunction()) return std::nullopt;
        auto own = ground_literal_axioms(t);
        for (const auto& q : cases) {
          auto theirs = proof_axioms(q);
          own.erase(std::remove_if(own.begin(), own.end(),
                                   [&](const LogicalForm& f) {
                                     return std::find(theirs.begin(), theirs.end(), f) != theirs.end();
                                   }),
                    own.end());
        }
        if (own.empty()) return std::nullopt;
        return t;
      });
      cases.push_back(std::move(p));
    }

    std::vector<LogicalForm> hyps;
    for (std::size_t k = 0; k < cases.size(); ++k) {
      auto own = ground_literal_axioms(cases[k]);
      for (std::size_t j = 0; j < cases.size(); ++j) {
        if (j == k) continue;
        auto theirs = proof_axioms(cases[j]);
        own.erase(std::remove_if(own.begin(), own.end(),
                                 [&](const LogicalForm& f) {
                                   return std::find(theirs.begin(), theirs.end(), f) != theirs.end();
                                 }),
                  own.end());
      }
      hyps.push_back(rng_.pick(own));
    }
    for (std::size_t k = 0; k < hyps.size(); ++k)
      for (std::size_t j = k + 1; j < hyps.size(); ++j)
        if (share_operands(hyps[k], hyps[j])) throw RetryExhausted("case hypotheses overlap");
    for (std::size_t k = 0; k < cases.size(); ++k) replace_leaf(cases[k], hyps[k]);

    LogicalForm disjunction = LogicalForm::disjunction(hyps);
    ProofTree a = gen(ConclusionConstraint::exactly({disjunction}), {RuleTag::DisjIntro}, d - 1, h);
    LogicalForm concl = cases[0].conclusion;
    std::vector<ProofTree> premises{std::move(a)};
    for (auto& c : cases) premises.push_back(std::move(c));
    return ProofTree::step(RuleTag::DisjElim, concl, std::move(premises), h, hyps);
  }

  ProofTree contradiction(std::size_t d, bool h) {
    ProofTree a = gen(ConclusionConstraint::negated(), {RuleTag::ProofByContradiction}, d - 1, h);
    if (!a.conclusion.is_negation() || !a.conclusion.inner().is_atom()) throw RetryExhausted("no negated atom");
    const LogicalForm s = a.conclusion.inner();
    const auto a_axioms = proof_axioms(a);

    std::vector<LogicalForm> options;
    ProofTree b = retry([&]() -> std::optional<ProofTree> {
      ProofTree t = gen(ConclusionConstraint::exactly({s}), {RuleTag::ProofByContradiction}, d - 1, true);
      options.clear();
      for (const auto& f : proof_axioms(t))
        if (f.is_atom() && std::find(a_axioms.begin(), a_axioms.end(), f) == a_axioms.end() && !equivalent(f, s))
          options.push_back(f);
      if (options.empty()) return std::nullopt;
      return t;
    });
    const LogicalForm s_prime = rng_.pick(options);
    replace_leaf(b, s_prime);
    return ProofTree::step(RuleTag::ProofByContradiction, LogicalForm::negation(s_prime), {std::move(a), std::move(b)},
                           h, {s_prime});
  }

  std::string e_;
  PredicatePool& pool_;
  Rng& rng_;
};

std::string example_id(const CompParams& p) {
  char seed[17];
  std::snprintf(seed, sizeof seed, "%016llx", static_cast<unsigned long long>(p.seed));
  std::string id = "compositional-m" + std::to_string(p.min_depth) + "-r" + std::to_string(p.num_rule_types);
  if (p.distractors) id += "-x";
  return id + "-" + seed;
}

}  // namespace

ConclusionPattern ConclusionPattern::conjunction(std::size_t arity, std::size_t slot, ConclusionPattern inner) {
  ConclusionPattern p;
  p.kind = Kind::Conjunction;
  p.arity = arity;
  p.slot = slot;
  p.inner = std::make_shared<const ConclusionPattern>(std::move(inner));
  return p;
}

bool ConclusionPattern::matches(const LogicalForm& phi) const {
  switch (kind) {
    case Kind::Any: return true;
    case Kind::Exact: return equivalent(*form, phi);
    case Kind::Negated: return phi.is_negation() && phi.inner().is_atom();
    case Kind::Conjunction:
      return phi.is_conjunction() && phi.operands().size() == arity && inner->matches(phi.operands()[slot]);
    case Kind::Disjunction: return phi.is_disjunction() && phi.operands().size() == arity;
  }
  return false;
}

ConclusionConstraint ConclusionConstraint::exactly(std::vector<LogicalForm> forms) {
  ConclusionConstraint c;
  for (auto& f : forms) c.patterns.push_back(ConclusionPattern::exact(std::move(f)));
  return c;
}

bool ConclusionConstraint::matches(const LogicalForm& phi) const {
  return std::any_of(patterns.begin(), patterns.end(), [&](const ConclusionPattern& p) { return p.matches(phi); });
}

LogicalForm sample_conclusion(const ConclusionConstraint& constraint, const std::string& entity, PredicatePool& pool,
                              Rng& rng) {
  if (constraint.empty()) throw std::invalid_argument("empty conclusion constraint");
  return Generator(entity, pool, rng).sample(constraint);
}

ProofTree generate_compositional_proof(const ConclusionConstraint& constraint, const std::set<RuleTag>& disallowed,
                                       std::size_t depth, const std::string& entity, bool hypothetical,
                                       PredicatePool& pool, Rng& rng) {
  return Generator(entity, pool, rng).gen(constraint, disallowed, depth, hypothetical);
}

Example generate_compositional_example(const CompParams& params, Rng& rng, const Vocabulary& vocab) {
  if (params.min_depth < 1) throw GenerationError("min_depth must be at least 1");
  if (params.num_rule_types < 1 || params.num_rule_types > deduction_rules().size())
    throw GenerationError("num_rule_types must be between 1 and 6");

  const std::string entity = params.entity.empty() ? sample_entity(rng, vocab) : params.entity;
  std::size_t failures[4] = {0, 0, 0, 0};  // retries, depth, rule types, consistency
  for (int attempt = 0; attempt < kOuterRetries; ++attempt) {
    const std::size_t depth = std::max(params.min_depth, params.num_rule_types) + rng.below(2);
    PredicatePool pool(rng, vocab);
    std::optional<ProofTree> proof;
    try {
      proof = generate_compositional_proof(ConclusionConstraint::universe(), {}, depth, entity, false, pool, rng);
    } catch (const RetryExhausted&) {
      ++failures[0];
      continue;
    } catch (const VocabularyExhausted&) {
      ++failures[0];
      continue;
    }
    auto m = tree_metrics(*proof);
    if (m.depth < params.min_depth) {
      ++failures[1];
      continue;
    }
    if (m.rule_types.size() != params.num_rule_types) {
      ++failures[2];
      continue;
    }
    auto theory = proof_axioms(*proof);
    if (!check_consistency(theory)) {
      ++failures[3];
      continue;
    }

    GenParams gp;
    gp.rule = proof->rule;
    gp.depth = m.depth;
    gp.width = m.width;
    gp.seed = params.seed;
    gp.ordering = params.ordering;
    LogicalForm query = proof->conclusion;
    Example ex{example_id(params), ExampleKind::Compositional, gp, params.min_depth, params.num_rule_types,
               std::move(theory), query, std::move(*proof), {}, {}, {}, {}};
    if (params.distractors) ex = add_distractors(std::move(ex), rng, vocab);
    assemble(ex, rng, vocab);
    return ex;
  }
  throw GenerationError("compositional generation failed after " + std::to_string(kOuterRetries) +
                        " attempts (inner retries " + std::to_string(failures[0]) + ", too shallow " +
                        std::to_string(failures[1]) + ", wrong rule-type count " + std::to_string(failures[2]) +
                        ", inconsistent " + std::to_string(failures[3]) + ")");
}

Example generate_compositional_example(const CompParams& params, const Vocabulary& vocab) {
  Rng rng(params.seed);
  return generate_compositional_example(params, rng, vocab);
}

}  // namespace deduce
