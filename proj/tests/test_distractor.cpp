#include "doctest.h"

#include <set>

#include "deduce/distractor.hpp"
#include "deduce/evaluator.hpp"
#include "deduce/oracle.hpp"
#include "deduce/rulegen.hpp"
#include "fixtures.hpp"

using namespace deduce;
using namespace deduce::testing::fx;

namespace {

std::set<std::string> predicates(const std::vector<LogicalForm>& forms) {
  std::set<std::string> out;
  for (const auto& f : forms)
    for (const auto& p : predicates_of(f)) out.insert(p);
  return out;
}

std::set<std::string> consequent_predicates(const LogicalForm& f) {
  if (f.is_universal()) return predicates_of(f.consequent());
  if (f.is_negation()) return {};
  return predicates_of(f);
}

Example bare(std::vector<LogicalForm> theory, LogicalForm query, ProofTree proof, RuleTag rule) {
  GenParams p;
  p.rule = rule;
  return Example{"t", ExampleKind::Rule, p, 0, 0, std::move(theory), std::move(query), std::move(proof), {}, {}, {}, {}};
}

}  // namespace

TEST_CASE("a cat rule gets a sibling rule with a fresh consequent") {
  Vocabulary v;
  v.add_noun("cat", false);
  v.add_adjective("feline", false);
  v.add_adjective("graceful");
  v.add_adjective("clumsy");
  v.add_entity("Alex");
  auto cats = all(var("cat"), var("feline"));
  auto ex = bare({at("cat", "alex"), cats}, at("feline", "alex"),
                 step(RuleTag::ImplicationElim, at("feline", "alex"), {ax(at("cat", "alex")), ax(cats)}),
                 RuleTag::ImplicationElim);
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(seed);
    auto out = add_distractors(ex, rng, v);
    CHECK(out.distractors.size() == 3);
    for (const auto& d : out.distractors)
      if (d.is_universal() && d.antecedent() == var("cat")) {
        auto text = render_form(d, v, {Quantifier::All, ListStyle::Chain});
        if (text == "All cats are graceful.") seen = true;
        CHECK((text == "All cats are graceful." || text == "All cats are clumsy."));
      }
  }
  CHECK(seen);
}

TEST_CASE("one hop set per implication hop") {
  for (std::size_t k = 1; k <= 5; ++k) {
    auto ex = generate_rule_example({RuleTag::ImplicationElim, k, 1, k});
    Rng rng(k);
    auto plan = plan_distractors(ex, rng);
    CHECK(plan.entries.size() == k);
    for (const auto& e : plan.entries) {
      CHECK(e.shadowed.is_universal());
      CHECK(e.forms.size() == 3);
    }
  }
}

TEST_CASE("pattern shapes") {
  Rng rng(4);
  auto ci = generate_rule_example({RuleTag::ConjIntro, 1, 3, 4});
  auto plan = plan_distractors(ci, rng);
  REQUIRE(plan.entries.size() == 1);
  // Rule with two distractor conjuncts and one gold conjunct, plus h1(c), h2(c).
  const auto& forms = plan.entries[0].forms;
  REQUIRE(forms.size() == 3);
  REQUIRE(forms[0].is_universal());
  CHECK(forms[0].antecedent().is_conjunction());
  CHECK(forms[0].antecedent().operands().size() == 3);
  CHECK(forms[1].is_atom());
  CHECK(forms[2].is_atom());

  auto de = generate_rule_example({RuleTag::DisjElim, 1, 3, 4});
  auto de_forms = plan_distractors(de, rng).forms();
  // Two rules per case, plus the disjunction of h'' and two h_i.
  CHECK(de_forms.size() == 7);
  CHECK(de_forms.back().is_disjunction());
  CHECK(de_forms.back().operands().size() == 3);

  auto pbc = generate_rule_example({RuleTag::ProofByContradiction, 1, 2, 4});
  auto pbc_forms = plan_distractors(pbc, rng).forms();
  REQUIRE(pbc_forms.size() == 3);
  CHECK(pbc_forms[0].antecedent().is_disjunction());
  CHECK(pbc_forms[1].antecedent().is_disjunction());
  CHECK(pbc_forms[2].is_negation());
}

TEST_CASE("already distracted examples are rejected") {
  auto ex = generate_rule_example({RuleTag::ImplicationElim, 1, 1, 1, true});
  Rng rng(1);
  CHECK_THROWS_AS(add_distractors(ex, rng), std::invalid_argument);
}

TEST_CASE("property: soundness, consistency, freshness") {
  const std::vector<GenParams> cells = {{RuleTag::ImplicationElim, 2, 1},     {RuleTag::ConjIntro, 2, 3},
                                        {RuleTag::ConjElim, 2, 3},           {RuleTag::DisjIntro, 2, 3},
                                        {RuleTag::DisjElim, 1, 3},           {RuleTag::ProofByContradiction, 1, 2},
                                        {RuleTag::ProofByContradiction, 1, 1}};
  for (auto p : cells) {
    CAPTURE(to_string(p.rule));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      p.seed = seed;
      p.distractors = false;
      auto plain = generate_rule_example(p);
      p.distractors = true;
      auto ex = generate_rule_example(p);
      REQUIRE(ex.distractors_present());

      CHECK(check_consistency(ex.theory));
      CHECK(provable(ex.theory, ex.query).provable);
      CHECK_FALSE(provable(ex.distractors, ex.query).provable);
      CHECK(score_example(ex, join_sentences(ex.chain_of_thought)).overall_correct);

      // Consequents are fresh, save the gold goal predicate in the cases
      // and contradiction patterns.
      auto existing = predicates(plain.theory);
      std::set<std::string> allowed;
      if (p.rule == RuleTag::DisjElim || p.rule == RuleTag::ProofByContradiction)
        for (const auto& f : plain.theory)
          if (f.is_universal())
            for (const auto& q : predicates_of(f.consequent())) allowed.insert(q);
      for (const auto& d : ex.distractors)
        for (const auto& q : consequent_predicates(d))
          if (existing.count(q)) CHECK_MESSAGE(allowed.count(q), d.to_sexpr());
    }
  }
}
