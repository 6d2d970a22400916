#include "deduce/distractor.hpp"

#include <set>
#include <stdexcept>

namespace deduce {

namespace {

const std::string kVar = "x";

LogicalForm vx(const std::string& p) { return LogicalForm::variable_atom(p, kVar); }

LogicalForm join(FormKind kind, std::vector<LogicalForm> ops) {
  if (ops.size() == 1) return ops[0];
  return kind == FormKind::Conjunction ? LogicalForm::conjunction(std::move(ops))
                                       : LogicalForm::disjunction(std::move(ops));
}

std::string entity_of(const Example& ex) {
  auto cs = constants_of(ex.query);
  if (cs.size() != 1) throw std::invalid_argument("distractors need a query about exactly one entity");
  return *cs.begin();
}

void walk(const ProofTree& t, std::vector<const ProofTree*>& out) {
  for (const auto& p : t.premises) walk(p, out);
  out.push_back(&t);
}

void collect_conclusions(const ProofTree& t, std::set<std::string>& keys) {
  keys.insert(t.conclusion.canonical_key());
  for (const auto& p : t.premises) collect_conclusions(p, keys);
}

class Planner {
 public:
  Planner(const Example& ex, Rng& rng, const Vocabulary& vocab)
      : ex_(ex), c_(entity_of(ex)), pool_(rng, vocab, used_predicates(ex)) {
    collect_conclusions(ex.gold_proof, proved_);
  }

  DistractorPlan run() {
    if (ex_.kind == ExampleKind::Rule)
      per_rule();
    else
      per_step();
    return std::move(plan_);
  }

 private:
  static std::set<std::string> used_predicates(const Example& ex) {
    std::set<std::string> out;
    for (const auto& f : ex.theory)
      for (const auto& p : predicates_of(f)) out.insert(p);
    for (const auto& p : predicates_of(ex.query)) out.insert(p);
    return out;
  }

  LogicalForm ground(const std::string& p) const { return LogicalForm::atom(p, c_); }
  LogicalForm lift(const LogicalForm& f) const { return generalize(f, c_, kVar); }
  bool proved(const LogicalForm& ground_form) const { return proved_.count(ground_form.canonical_key()) > 0; }

  void add(const LogicalForm& shadowed, std::vector<LogicalForm> forms) {
    plan_.entries.push_back({shadowed, std::move(forms)});
  }

  // ∀x(ψ→h), h(c), ∀x(h→h′)
  void implication(const LogicalForm& shadowed, const LogicalForm& antecedent) {
    auto h = pool_.fresh(), h2 = pool_.fresh();
    add(shadowed, {LogicalForm::universal(kVar, antecedent, vx(h)), ground(h),
                   LogicalForm::universal(kVar, vx(h), vx(h2))});
  }

  // ∀x(h₁ op … op h_{n−1} op kept → g′) with grounded h_i(c).
  void connective(const LogicalForm& shadowed, FormKind kind, const LogicalForm& kept, std::size_t n) {
    std::vector<LogicalForm> ops, forms;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto h = pool_.fresh();
      ops.push_back(vx(h));
      forms.push_back(ground(h));
    }
    ops.push_back(kept);
    forms.insert(forms.begin(), LogicalForm::universal(kVar, join(kind, std::move(ops)), vx(pool_.fresh())));
    add(shadowed, std::move(forms));
  }

  // ∀x(ψ → h₁∧…∧h_n)
  void elimination(const LogicalForm& shadowed, const LogicalForm& antecedent, std::size_t n) {
    std::vector<LogicalForm> ops;
    for (std::size_t i = 0; i < n; ++i) ops.push_back(vx(pool_.fresh()));
    add(shadowed, {LogicalForm::universal(kVar, antecedent, join(FormKind::Conjunction, std::move(ops)))});
  }

  // Per case ∀x(a_i→h′) and ∀x(h_i→γ); plus h″(c)∨h₁(c)∨…∨h_{n−1}(c).
  void cases(const LogicalForm& shadowed, const std::vector<LogicalForm>& case_bodies, const LogicalForm& goal_body) {
    auto h_shared = pool_.fresh();
    std::vector<LogicalForm> forms, disjuncts{ground(pool_.fresh())};
    for (std::size_t i = 0; i < case_bodies.size(); ++i) {
      auto h = pool_.fresh();
      forms.push_back(LogicalForm::universal(kVar, case_bodies[i], vx(h_shared)));
      forms.push_back(LogicalForm::universal(kVar, vx(h), goal_body));
      if (i + 1 < case_bodies.size()) disjuncts.push_back(ground(h));
    }
    forms.push_back(join(FormKind::Disjunction, std::move(disjuncts)));
    add(shadowed, std::move(forms));
  }

  // ∀x(F→h), ∀x(h₁∨…∨h_n→g), ¬h′(c)
  void contradiction(const LogicalForm& shadowed, const LogicalForm& antecedent, const LogicalForm& goal_body,
                     std::size_t n) {
    std::vector<LogicalForm> hs;
    auto h = pool_.fresh();
    for (std::size_t i = 0; i < n; ++i) hs.push_back(vx(pool_.fresh()));
    add(shadowed, {LogicalForm::universal(kVar, antecedent, vx(h)),
                   LogicalForm::universal(kVar, join(FormKind::Disjunction, std::move(hs)), goal_body),
                   LogicalForm::negation(ground(pool_.fresh()))});
  }

  // Operand of a gold antecedent that the gold proof establishes; the last
  // one if several are.
  LogicalForm kept_operand(const LogicalForm& antecedent) const {
    const auto& ops = antecedent.operands();
    for (auto it = ops.rbegin(); it != ops.rend(); ++it)
      if (proved(substitute(*it, kVar, c_))) return *it;
    return ops.back();
  }

  void per_rule() {
    auto axioms = proof_axioms(ex_.gold_proof);
    std::vector<LogicalForm> rules;
    for (const auto& a : axioms)
      if (a.is_universal()) rules.push_back(a);

    switch (ex_.params.rule) {
      case RuleTag::ImplicationElim:
        for (const auto& r : rules) implication(r, r.antecedent());
        break;
      case RuleTag::ConjIntro:
      case RuleTag::DisjIntro:
        for (const auto& r : rules) {
          const auto& a = r.antecedent();
          if (a.is_conjunction() || a.is_disjunction())
            connective(r, a.kind(), kept_operand(a), a.operands().size());
          else
            implication(r, a);
        }
        break;
      case RuleTag::ConjElim:
        for (const auto& r : rules) {
          if (r.consequent().is_conjunction())
            elimination(r, r.antecedent(), r.consequent().operands().size());
          else
            implication(r, r.antecedent());
        }
        break;
      case RuleTag::DisjElim: {
        std::vector<LogicalForm> bodies;
        for (const auto& r : rules) bodies.push_back(r.antecedent());
        cases(ex_.query, bodies, lift(ex_.query));
        break;
      }
      case RuleTag::ProofByContradiction:
        for (const auto& r : rules) {
          const auto& a = r.antecedent();
          contradiction(r, a, r.consequent(), a.is_disjunction() ? a.operands().size() : 1);
        }
        break;
      default:
        throw std::invalid_argument("no distractor scheme for this rule");
    }
  }

  void per_step() {
    std::vector<const ProofTree*> steps;
    walk(ex_.gold_proof, steps);
    for (const ProofTree* t : steps) {
      const auto& concl = t->conclusion;
      switch (t->rule) {
        case RuleTag::ImplicationElim:
          for (const auto& p : t->premises)
            if (p.conclusion.is_universal()) implication(concl, p.conclusion.antecedent());
          break;
        case RuleTag::ConjIntro:
          connective(concl, FormKind::Conjunction, lift(concl.operands().back()), concl.operands().size());
          break;
        case RuleTag::DisjIntro:
          connective(concl, FormKind::Disjunction, lift(t->premises[0].conclusion), concl.operands().size());
          break;
        case RuleTag::ConjElim: {
          const auto& c = t->premises[0].conclusion;
          elimination(concl, lift(c), c.operands().size());
          break;
        }
        case RuleTag::DisjElim: {
          std::vector<LogicalForm> bodies;
          for (const auto& d : t->premises[0].conclusion.operands()) bodies.push_back(lift(d));
          cases(concl, bodies, lift(concl));
          break;
        }
        case RuleTag::ProofByContradiction:
          contradiction(concl, lift(negate(concl)), lift(negate(t->premises[0].conclusion)), 1);
          break;
        default:
          break;
      }
    }
  }

  const Example& ex_;
  std::string c_;
  PredicatePool pool_;
  std::set<std::string> proved_;
  DistractorPlan plan_;
};

}  // namespace

std::vector<LogicalForm> DistractorPlan::forms() const {
  std::vector<LogicalForm> out;
  std::set<std::string> seen;
  for (const auto& e : entries)
    for (const auto& f : e.forms)
      if (seen.insert(f.canonical_key()).second) out.push_back(f);
  return out;
}

DistractorPlan plan_distractors(const Example& example, Rng& rng, const Vocabulary& vocab) {
  return Planner(example, rng, vocab).run();
}

Example add_distractors(Example example, Rng& rng, const Vocabulary& vocab) {
  if (example.distractors_present()) throw std::invalid_argument("example already has distractors");
  std::set<std::string> present;
  for (const auto& f : example.theory) present.insert(f.canonical_key());
  for (const auto& f : plan_distractors(example, rng, vocab).forms()) {
    if (!present.insert(f.canonical_key()).second) continue;
    example.theory.push_back(f);
    example.distractors.push_back(f);
  }
  example.params.distractors = true;
  example.question.clear();
  example.query_text.clear();
  example.chain_of_thought.clear();
  return example;
}

}  // namespace deduce
