#include "doctest.h"

#include <algorithm>

#include "deduce/compgen.hpp"
#include "deduce/evaluator.hpp"
#include "deduce/oracle.hpp"
#include "deduce/rulegen.hpp"
#include "fixtures.hpp"

using namespace deduce;
using namespace deduce::testing::fx;

namespace {

// Recomputed here rather than through tree_metrics.
std::size_t chain(const ProofTree& t) {
  if (t.is_leaf()) return 0;
  std::size_t best = 0;
  for (const auto& p : t.premises) best = std::max(best, chain(p));
  return best + 1;
}

void rules_used(const ProofTree& t, std::set<RuleTag>& out) {
  if (!t.is_leaf()) out.insert(t.rule);
  for (const auto& p : t.premises) rules_used(p, out);
}

// Walks the tree checking the structural promises of the generator.
void check_structure(const ProofTree& t, bool inside_hypothesis) {
  if (inside_hypothesis) {
    CHECK(t.rule != RuleTag::ProofByContradiction);
    CHECK(t.rule != RuleTag::DisjElim);
  }
  for (const auto& p : t.premises) {
    if (t.rule == RuleTag::ConjIntro) CHECK(p.rule != RuleTag::ConjElim);
    if (t.rule == RuleTag::ConjElim) CHECK(p.rule != RuleTag::ConjIntro);
    if (t.rule == RuleTag::DisjIntro) CHECK(p.rule != RuleTag::DisjElim);
    if (t.rule == RuleTag::DisjElim) CHECK(p.rule != RuleTag::DisjIntro);
  }
  bool opens = t.rule == RuleTag::ProofByContradiction || t.rule == RuleTag::DisjElim;
  for (std::size_t i = 0; i < t.premises.size(); ++i)
    check_structure(t.premises[i], inside_hypothesis || (opens && i > 0));
}

}  // namespace

TEST_CASE("sampling conclusions") {
  Rng rng(1);
  PredicatePool pool(rng, Vocabulary::standard());
  auto any = sample_conclusion(ConclusionConstraint::universe(), "alex", pool, rng);
  CHECK(any.is_atom());
  CHECK(any.argument() == "alex");

  auto f = at("f", "c"), g = at("g", "c");
  CHECK(sample_conclusion(ConclusionConstraint::exactly({conj({f, g}), f}), "c", pool, rng) == f);
  CHECK(sample_conclusion(ConclusionConstraint::negated(), "c", pool, rng).is_negation());
  CHECK_THROWS_AS(sample_conclusion(ConclusionConstraint{}, "c", pool, rng), std::invalid_argument);

  // Uniform between two minimal forms.
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    if (sample_conclusion(ConclusionConstraint::exactly({no(f), no(g)}), "c", pool, rng) == no(f)) ++first;
  CHECK(std::abs(first / double(n) - 0.5) < 0.02);

  auto conj3 = ConclusionPattern::conjunction(3, 1, ConclusionPattern::exact(f));
  auto c = sample_conclusion({{conj3}}, "c", pool, rng);
  REQUIRE(c.is_conjunction());
  CHECK(c.operands()[1] == f);
  CHECK(conj3.matches(c));
}

TEST_CASE("base case and constraint respect") {
  Rng rng(2);
  PredicatePool pool(rng, Vocabulary::standard());
  auto cat = at("cat", "alex");
  auto leaf = generate_compositional_proof(ConclusionConstraint::exactly({cat}), {}, 0, "alex", false, pool, rng);
  CHECK(leaf.rule == RuleTag::Axiom);
  CHECK(leaf.conclusion == cat);

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng r(seed);
    PredicatePool p(r, Vocabulary::standard());
    for (const auto& C : {ConclusionConstraint::negated(), ConclusionConstraint::exactly({cat})}) {
      try {
        auto t = generate_compositional_proof(C, {}, 2, "alex", false, p, r);
        CHECK(C.matches(t.conclusion));
      } catch (const RetryExhausted&) {
      } catch (const VocabularyExhausted&) {
      }
    }
  }
}

TEST_CASE("examples meet their parameters and verify") {
  for (std::size_t m = 1; m <= 3; ++m)
    for (std::size_t r = 1; r <= 4; ++r)
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(m);
        CAPTURE(r);
        CAPTURE(seed);
        auto ex = generate_compositional_example({m, r, seed});
        CHECK(ex.kind == ExampleKind::Compositional);
        CHECK(chain(ex.gold_proof) >= m);
        std::set<RuleTag> used;
        rules_used(ex.gold_proof, used);
        CHECK(used.size() == r);
        CHECK(ex.query == ex.gold_proof.conclusion);
        CHECK(assumptions_discharged(ex.gold_proof));
        check_structure(ex.gold_proof, false);
        CHECK(check_consistency(ex.theory));
        CHECK(score_example(ex, join_sentences(ex.chain_of_thought)).overall_correct);
        if (seed < 5) CHECK(provable(ex.theory, ex.query).provable);
      }
}

TEST_CASE("a figure-7 sized example") {
  auto ex = generate_compositional_example({4, 3, 11, "polly"});
  CHECK(tree_metrics(ex.gold_proof).depth >= 4);
  CHECK(tree_metrics(ex.gold_proof).rule_types.size() == 3);
  CHECK(constants_of(ex.query) == std::set<std::string>{"polly"});
  CHECK(score_example(ex, join_sentences(ex.chain_of_thought)).overall_correct);
}

TEST_CASE("determinism and parameter errors") {
  CompParams p{2, 2, 5};
  CHECK(generate_compositional_example(p) == generate_compositional_example(p));
  p.distractors = true;
  CHECK(generate_compositional_example(p) == generate_compositional_example(p));
  CHECK_THROWS_AS(generate_compositional_example({0, 1, 1}), GenerationError);
  CHECK_THROWS_AS(generate_compositional_example({1, 7, 1}), GenerationError);
}

TEST_CASE("compositional distractors") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    CompParams p{1 + seed % 3, 1 + seed % 4, seed};
    p.distractors = true;
    auto ex = generate_compositional_example(p);
    CAPTURE(seed);
    CHECK(ex.distractors_present());
    CHECK(check_consistency(ex.theory));
    CHECK_FALSE(provable(ex.distractors, ex.query).provable);
    CHECK(score_example(ex, join_sentences(ex.chain_of_thought)).overall_correct);
  }
}
