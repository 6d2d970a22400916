#include "deduce/rulegen.hpp"

#include <cstdio>

#include "deduce/distractor.hpp"
#include "deduce/language.hpp"

namespace deduce {

namespace {

const std::string kVar = "x";

LogicalForm vx(const std::string& p) { return LogicalForm::variable_atom(p, kVar); }

LogicalForm join(bool conjunction, std::vector<LogicalForm> ops) {
  return conjunction ? LogicalForm::conjunction(std::move(ops)) : LogicalForm::disjunction(std::move(ops));
}

Ontology linear_ontology(std::size_t length, std::string entity, PredicatePool& pool) {
  if (length < 2) throw GenerationError("an ontology needs at least two concepts");
  Ontology o;
  o.entity = std::move(entity);
  for (std::size_t i = 0; i < length; ++i) o.concepts.push_back(pool.fresh());
  for (std::size_t i = 0; i + 1 < length; ++i) o.supertype[o.concepts[i]] = o.concepts[i + 1];
  o.ground_memberships.push_back(LogicalForm::atom(o.concepts[0], o.entity));
  return o;
}

struct Draft {
  std::vector<LogicalForm> theory;
  ProofTree proof;
};

class Builder {
 public:
  Builder(const GenParams& p, Rng& rng, const Vocabulary& vocab)
      : p_(p), rng_(rng), c_(sample_entity(rng, vocab)), pool_(rng, vocab) {}

  Draft build() {
    switch (p_.rule) {
      case RuleTag::ImplicationElim: return implication();
      case RuleTag::ConjIntro: return introduction(true);
      case RuleTag::DisjIntro: return introduction(false);
      case RuleTag::ConjElim: return conj_elimination();
      case RuleTag::DisjElim: return cases();
      case RuleTag::ProofByContradiction: return contradiction();
      default: throw GenerationError("not a deduction rule");
    }
  }

 private:
  LogicalForm at(const std::string& p) const { return LogicalForm::atom(p, c_); }

  Draft implication() {
    // The walk covers the whole chain: no padding concepts.
    Ontology o = linear_ontology(p_.depth + 1, c_, pool_);
    auto rules = o.rules();
    std::vector<LogicalForm> theory = o.ground_memberships;
    ProofTree proof = ProofTree::axiom(theory[0]);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      theory.push_back(rules[i]);
      proof = ProofTree::step(RuleTag::ImplicationElim, at(o.concepts[i + 1]), {proof, ProofTree::axiom(rules[i])});
    }
    return {theory, proof};
  }

  // ∀x(f₁ op … op f_n → g), the consequent of each hop filling a random
  // antecedent slot of the next.
  Draft introduction(bool conjunction) {
    const std::size_t n = p_.width;
    std::vector<LogicalForm> theory;
    std::optional<ProofTree> prev;
    std::string prev_pred;
    for (std::size_t hop = 0; hop < p_.depth; ++hop) {
      const std::size_t slot = rng_.below(n);
      std::vector<LogicalForm> body, ground;
      std::vector<ProofTree> proofs;
      for (std::size_t i = 0; i < n; ++i) {
        std::string pred = (prev && i == slot) ? prev_pred : pool_.fresh();
        body.push_back(vx(pred));
        ground.push_back(at(pred));
        if (prev && i == slot) {
          proofs.push_back(*prev);
        } else if (conjunction || (hop == 0 && i == slot)) {
          theory.push_back(at(pred));
          proofs.push_back(ProofTree::axiom(at(pred)));
        }
      }
      ProofTree intro = conjunction
                            ? ProofTree::step(RuleTag::ConjIntro, join(true, ground), std::move(proofs))
                            : ProofTree::step(RuleTag::DisjIntro, join(false, ground), std::move(proofs));
      std::string g = pool_.fresh();
      auto rule = LogicalForm::universal(kVar, join(conjunction, body), vx(g));
      theory.push_back(rule);
      prev = ProofTree::step(RuleTag::ImplicationElim, at(g), {intro, ProofTree::axiom(rule)});
      prev_pred = g;
    }
    return {theory, *prev};
  }

  // ∀x(f → g₁∧…∧g_n), continuing from a random conjunct.
  Draft conj_elimination() {
    std::string cur = pool_.fresh();
    std::vector<LogicalForm> theory{at(cur)};
    ProofTree proof = ProofTree::axiom(at(cur));
    for (std::size_t hop = 0; hop < p_.depth; ++hop) {
      std::vector<std::string> gs;
      std::vector<LogicalForm> body, ground;
      for (std::size_t i = 0; i < p_.width; ++i) {
        gs.push_back(pool_.fresh());
        body.push_back(vx(gs.back()));
        ground.push_back(at(gs.back()));
      }
      auto rule = LogicalForm::universal(kVar, vx(cur), join(true, body));
      theory.push_back(rule);
      auto impl = ProofTree::step(RuleTag::ImplicationElim, join(true, ground), {proof, ProofTree::axiom(rule)});
      const std::size_t slot = rng_.below(p_.width);
      proof = ProofTree::step(RuleTag::ConjElim, at(gs[slot]), {impl});
      cur = gs[slot];
    }
    return {theory, proof};
  }

  Draft cases() {
    std::vector<std::string> fs;
    std::vector<LogicalForm> disjuncts;
    for (std::size_t i = 0; i < p_.width; ++i) {
      fs.push_back(pool_.fresh());
      disjuncts.push_back(at(fs.back()));
    }
    std::string g = pool_.fresh();
    auto disjunction = join(false, disjuncts);
    std::vector<LogicalForm> theory{disjunction};
    std::vector<ProofTree> premises{ProofTree::axiom(disjunction)};
    for (const auto& f : fs) {
      auto rule = LogicalForm::universal(kVar, vx(f), vx(g));
      theory.push_back(rule);
      premises.push_back(ProofTree::step(RuleTag::ImplicationElim, at(g),
                                         {ProofTree::assumption(at(f)), ProofTree::axiom(rule, true)}, true));
    }
    return {theory, ProofTree::step(RuleTag::DisjElim, at(g), std::move(premises), false, disjuncts)};
  }

  // ¬g(c) and ∀x(f₁∨…∨f_n → g); each ¬f_i by contradiction, then joined.
  Draft contradiction() {
    const std::size_t n = p_.width;
    std::string g = pool_.fresh();
    std::vector<std::string> fs;
    for (std::size_t i = 0; i < n; ++i) fs.push_back(pool_.fresh());

    std::vector<LogicalForm> body, ground;
    for (const auto& f : fs) {
      body.push_back(vx(f));
      ground.push_back(at(f));
    }
    auto not_g = LogicalForm::negation(at(g));
    auto rule = LogicalForm::universal(kVar, n == 1 ? body[0] : join(false, body), vx(g));

    std::vector<ProofTree> refutations;
    std::vector<LogicalForm> negated;
    for (const auto& f : ground) {
      ProofTree fact = ProofTree::assumption(f);
      if (n > 1) fact = ProofTree::step(RuleTag::DisjIntro, join(false, ground), {fact}, true);
      // The rule is stated before the assumption.
      auto impl = ProofTree::step(RuleTag::ImplicationElim, at(g), {ProofTree::axiom(rule, true), fact}, true);
      negated.push_back(LogicalForm::negation(f));
      refutations.push_back(ProofTree::step(RuleTag::ProofByContradiction, negated.back(),
                                            {ProofTree::axiom(not_g), impl}, false, {f}));
    }
    ProofTree proof = n == 1 ? refutations[0]
                             : ProofTree::step(RuleTag::ConjIntro, join(true, negated), std::move(refutations));
    return {{not_g, rule}, proof};
  }

  const GenParams& p_;
  Rng& rng_;
  std::string c_;
  PredicatePool pool_;
};

std::string example_id(const GenParams& p) {
  char seed[17];
  std::snprintf(seed, sizeof seed, "%016llx", static_cast<unsigned long long>(p.seed));
  std::string id = std::string(to_string(p.rule)) + "-d" + std::to_string(p.depth) + "-w" + std::to_string(p.width);
  if (p.distractors) id += "-x";
  return id + "-" + seed;
}

}  // namespace

std::vector<LogicalForm> Ontology::rules() const {
  std::vector<LogicalForm> out;
  for (std::size_t i = 0; i + 1 < concepts.size(); ++i)
    out.push_back(LogicalForm::universal(kVar, vx(concepts[i]), vx(concepts[i + 1])));
  return out;
}

Ontology generate_linear_ontology(std::size_t length, Rng& rng, const Vocabulary& vocab) {
  std::string entity = sample_entity(rng, vocab);
  PredicatePool pool(rng, vocab);
  return linear_ontology(length, std::move(entity), pool);
}

std::string sample_entity(Rng& rng, const Vocabulary& vocab) {
  if (vocab.entities().empty()) throw VocabularyExhausted("vocabulary has no entity names");
  return rng.pick(vocab.entities());
}

void validate(const GenParams& p) {
  if (p.depth < 1 || p.width < 1) throw GenerationError("depth and width must be at least 1");
  switch (p.rule) {
    case RuleTag::ImplicationElim:
      if (p.width != 1) throw GenerationError("implication elimination has width 1");
      break;
    case RuleTag::ConjIntro:
    case RuleTag::ConjElim:
    case RuleTag::DisjIntro:
      if (p.width < 2) throw GenerationError("connective rules need width >= 2");
      break;
    case RuleTag::DisjElim:
      if (p.width < 2) throw GenerationError("proof by cases needs width >= 2");
      if (p.depth != 1) throw GenerationError("proof by cases has depth 1");
      break;
    case RuleTag::ProofByContradiction:
      if (p.depth != 1) throw GenerationError("proof by contradiction has depth 1");
      break;
    default:
      throw GenerationError("not a deduction rule: " + std::string(to_string(p.rule)));
  }
}

Example generate_rule_example(const GenParams& params, Rng& rng, const Vocabulary& vocab) {
  validate(params);
  Draft d = Builder(params, rng, vocab).build();

  auto m = tree_metrics(d.proof);
  if (m.hop_depth != params.depth || m.arity != params.width)
    throw std::logic_error("generated proof does not match its parameters");

  GenParams recorded = params;
  recorded.distractors = false;
  LogicalForm query = d.proof.conclusion;
  Example ex{example_id(params), ExampleKind::Rule, recorded, 0, 0, std::move(d.theory), query, std::move(d.proof),
             {}, {}, {}, {}};
  if (params.distractors) ex = add_distractors(std::move(ex), rng, vocab);
  assemble(ex, rng, vocab);
  return ex;
}

Example generate_rule_example(const GenParams& params, const Vocabulary& vocab) {
  Rng rng(params.seed);
  return generate_rule_example(params, rng, vocab);
}

}  // namespace deduce
