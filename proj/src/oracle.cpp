#include "deduce/oracle.hpp"

#include <set>

namespace deduce {

namespace {

struct Universe {
  // Ground conjunctions and disjunctions that introduction rules may build.
  std::vector<LogicalForm> introducible;
  // Candidates for contradiction search.
  std::vector<LogicalForm> assumable;
  // Every universal axiom instantiated at every entity.
  std::vector<std::pair<LogicalForm, LogicalForm>> instances;
};

void note_ground(const LogicalForm& f, Universe& u, std::set<std::string>& seen) {
  if (!seen.insert(f.canonical_key()).second) return;
  if (f.is_conjunction() || f.is_disjunction()) {
    u.introducible.push_back(f);
    for (const auto& op : f.operands()) note_ground(op, u, seen);
  }
  u.assumable.push_back(f.is_negation() ? f.inner() : f);
}

Universe build_universe(const std::vector<LogicalForm>& axioms, const std::vector<LogicalForm>& targets) {
  std::set<std::string> entities;
  for (const auto& f : axioms)
    for (const auto& c : constants_of(f)) entities.insert(c);
  for (const auto& f : targets)
    for (const auto& c : constants_of(f)) entities.insert(c);

  Universe u;
  std::set<std::string> seen;
  auto visit = [&](const LogicalForm& f) {
    if (!f.is_universal()) {
      note_ground(f, u, seen);
      return;
    }
    for (const auto& e : entities) {
      auto ant = substitute(f.antecedent(), f.variable(), e);
      auto cons = substitute(f.consequent(), f.variable(), e);
      note_ground(ant, u, seen);
      note_ground(cons, u, seen);
    }
  };
  for (const auto& f : axioms) {
    visit(f);
    if (f.is_universal())
      for (const auto& e : entities)
        u.instances.emplace_back(substitute(f.antecedent(), f.variable(), e),
                                 substitute(f.consequent(), f.variable(), e));
  }
  for (const auto& f : targets) visit(f);
  return u;
}

class Prover {
 public:
  Prover(const Universe& u, std::size_t budget) : u_(u), budget_(budget) {}

  bool out_of_budget() const { return budget_ == 0; }

  bool add(Closure& c, const LogicalForm& f) {
    if (!c.keys.insert(f.canonical_key()).second) return false;
    c.facts.push_back(f);
    spend(c);
    return true;
  }

  // Implication elimination, conjunction elimination/introduction and
  // disjunction introduction to a fixpoint.
  void saturate(Closure& c) {
    bool changed = true;
    while (changed && !out_of_budget()) {
      changed = false;
      spend(c);
      for (std::size_t i = 0; i < c.facts.size(); ++i) {
        if (!c.facts[i].is_conjunction()) continue;
        auto ops = c.facts[i].operands();
        for (const auto& op : ops) changed |= add(c, op);
      }
      for (const auto& f : u_.introducible) {
        if (c.contains(f)) continue;
        bool ok = f.is_conjunction();
        for (const auto& op : f.operands()) {
          bool known = c.contains(op);
          if (f.is_conjunction() && !known) ok = false;
          if (f.is_disjunction() && known) ok = true;
        }
        if (ok) changed |= add(c, f);
      }
      for (const auto& [ant, cons] : u_.instances)
        if (c.contains(ant)) changed |= add(c, cons);
    }
  }

  Closure extended(const Closure& c, const LogicalForm& f) {
    Closure copy = c;
    add(copy, f);
    saturate(copy);
    return copy;
  }

  void run(Closure& c) {
    while (!out_of_budget()) {
      saturate(c);
      std::size_t before = c.facts.size();

      // One level of case splitting.
      std::vector<LogicalForm> disjunctions;
      for (const auto& f : c.facts)
        if (f.is_disjunction()) disjunctions.push_back(f);
      for (const auto& d : disjunctions) {
        std::vector<Closure> branches;
        for (const auto& op : d.operands()) branches.push_back(extended(c, op));
        std::vector<LogicalForm> common;
        for (const auto& f : branches[0].facts) {
          if (c.contains(f)) continue;
          bool everywhere = true;
          for (std::size_t b = 1; b < branches.size() && everywhere; ++b) everywhere = branches[b].contains(f);
          if (everywhere) common.push_back(f);
        }
        for (const auto& f : common) add(c, f);
      }

      // Contradiction search.
      for (const auto& a : u_.assumable) {
        if (out_of_budget()) break;
        auto na = negate(a);
        if (c.contains(a) || c.contains(na)) continue;
        if (extended(c, a).inconsistent()) add(c, na);
      }

      if (c.facts.size() == before) break;
    }
    // Ex falso, restricted to the universe so the closure stays finite.
    if (c.inconsistent() && !out_of_budget()) {
      for (const auto& a : u_.assumable) {
        add(c, a);
        add(c, negate(a));
      }
      for (const auto& f : u_.introducible) add(c, f);
    }
  }

 private:
  void spend(Closure& c) {
    if (budget_ == 0) {
      c.complete = false;
      return;
    }
    if (--budget_ == 0) c.complete = false;
  }

  const Universe& u_;
  std::size_t budget_;
};

}  // namespace

bool Closure::inconsistent() const {
  for (const auto& f : facts)
    if (contains(negate(f))) return true;
  return false;
}

Closure forward_chain(const std::vector<LogicalForm>& axioms, std::size_t max_steps,
                      const std::vector<LogicalForm>& targets) {
  Universe u = build_universe(axioms, targets);
  Prover prover(u, max_steps);
  Closure c;
  for (const auto& a : axioms) prover.add(c, a);
  prover.run(c);
  if (prover.out_of_budget()) c.complete = false;
  return c;
}

Provability provable(const std::vector<LogicalForm>& axioms, const LogicalForm& goal, std::size_t max_steps) {
  if (goal.is_universal()) {
    const std::string fresh = "oracle-fresh-entity";
    auto extended = axioms;
    extended.push_back(substitute(goal.antecedent(), goal.variable(), fresh));
    auto target = substitute(goal.consequent(), goal.variable(), fresh);
    Closure c = forward_chain(extended, max_steps, {target});
    return {c.contains(target), c.complete};
  }
  Closure c = forward_chain(axioms, max_steps, {goal});
  return {c.contains(goal), c.complete};
}

bool check_consistency(const std::vector<LogicalForm>& axioms, std::size_t max_steps) {
  return !forward_chain(axioms, max_steps).inconsistent();
}

}  // namespace deduce
