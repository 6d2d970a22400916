#pragma once

// Hand-built examples transcribed from the published figures and tables, with
// the surface style of every sentence pinned so rendering is exact.

#include <map>
#include <string>
#include <vector>

#include "deduce/language.hpp"
#include "deduce/logic.hpp"

namespace deduce::testing {

struct Fixture {
  std::string name;
  std::vector<LogicalForm> theory;
  LogicalForm query;
  ProofTree proof;
  std::vector<std::string> cot;
  std::vector<std::string> question;  // empty: not checked
  std::string query_text;             // empty: not checked
  std::map<std::string, Style> styles;

  StylePicker picker() const {
    return [styles = styles](const LogicalForm& phi) {
      auto it = styles.find(phi.canonical_key());
      return it == styles.end() ? Style{} : it->second;
    };
  }
};

namespace fx {

inline LogicalForm at(const std::string& p, const std::string& c) { return LogicalForm::atom(p, c); }
inline LogicalForm var(const std::string& p) { return LogicalForm::variable_atom(p, "x"); }
inline LogicalForm no(const LogicalForm& f) { return LogicalForm::negation(f); }
inline LogicalForm all(const LogicalForm& a, const LogicalForm& b) { return LogicalForm::universal("x", a, b); }
inline LogicalForm conj(std::vector<LogicalForm> ops) { return LogicalForm::conjunction(std::move(ops)); }
inline LogicalForm disj(std::vector<LogicalForm> ops) { return LogicalForm::disjunction(std::move(ops)); }
inline ProofTree ax(const LogicalForm& f, bool hyp = false) { return ProofTree::axiom(f, hyp); }
inline ProofTree step(RuleTag r, const LogicalForm& c, std::vector<ProofTree> ps, bool hyp = false,
                      std::vector<LogicalForm> d = {}) {
  return ProofTree::step(r, c, std::move(ps), hyp, std::move(d));
}

}  // namespace fx

inline std::vector<Fixture> deduction_rule_fixtures() {
  using namespace fx;
  std::vector<Fixture> out;

  out.push_back({"implication elimination",
                 {at("cat", "alex"), all(var("cat"), var("carnivore"))},
                 at("carnivore", "alex"),
                 step(RuleTag::ImplicationElim, at("carnivore", "alex"),
                      {ax(at("cat", "alex")), ax(all(var("cat"), var("carnivore")))}),
                 {"Alex is a cat.", "All cats are carnivores.", "Alex is a carnivore."},
                 {},
                 {},
                 {}});

  auto cat_orange = conj({at("cat", "alex"), at("orange", "alex")});
  out.push_back({"conjunction introduction",
                 {at("cat", "alex"), at("orange", "alex")},
                 cat_orange,
                 step(RuleTag::ConjIntro, cat_orange, {ax(at("cat", "alex")), ax(at("orange", "alex"))}),
                 {"Alex is a cat.", "Alex is orange.", "Alex is a cat and orange."},
                 {},
                 {},
                 {}});

  out.push_back({"conjunction elimination",
                 {cat_orange},
                 at("orange", "alex"),
                 step(RuleTag::ConjElim, at("orange", "alex"), {ax(cat_orange)}),
                 {"Alex is a cat and orange.", "Alex is orange."},
                 {},
                 {},
                 {}});

  auto cat_or_orange = disj({at("cat", "alex"), at("orange", "alex")});
  out.push_back({"disjunction introduction",
                 {at("cat", "alex")},
                 cat_or_orange,
                 step(RuleTag::DisjIntro, cat_or_orange, {ax(at("cat", "alex"))}),
                 {"Alex is a cat.", "Alex is a cat or orange."},
                 {},
                 {},
                 {}});

  auto cat_or_dog = disj({at("cat", "alex"), at("dog", "alex")});
  auto warm = at("warm-blooded", "alex");
  auto cats_warm = all(var("cat"), var("warm-blooded"));
  auto dogs_warm = all(var("dog"), var("warm-blooded"));
  out.push_back(
      {"disjunction elimination",
       {cat_or_dog, cats_warm, dogs_warm},
       warm,
       step(RuleTag::DisjElim, warm,
            {ax(cat_or_dog),
             step(RuleTag::ImplicationElim, warm, {ProofTree::assumption(at("cat", "alex")), ax(cats_warm, true)}, true),
             step(RuleTag::ImplicationElim, warm, {ProofTree::assumption(at("dog", "alex")), ax(dogs_warm, true)}, true)},
            false, {at("cat", "alex"), at("dog", "alex")}),
       {"Alex is a cat or a dog.", "Suppose Alex is a cat.", "All cats are warm-blooded.", "Alex is warm-blooded.",
        "Suppose Alex is a dog.", "All dogs are warm-blooded.", "Alex is warm-blooded.",
        "Since Alex is a cat or a dog, Alex is warm-blooded."},
       {},
       {},
       {}});

  auto cold = at("cold-blooded", "alex");
  auto mammals_not_cold = all(var("mammal"), no(var("cold-blooded")));
  out.push_back({"proof by contradiction",
                 {cold, mammals_not_cold},
                 no(at("mammal", "alex")),
                 step(RuleTag::ProofByContradiction, no(at("mammal", "alex")),
                      {ax(cold), step(RuleTag::ImplicationElim, no(cold),
                                      {ax(mammals_not_cold, true), ProofTree::assumption(at("mammal", "alex"))}, true)},
                      false, {at("mammal", "alex")}),
                 {"Alex is cold-blooded.", "All mammals are not cold-blooded.", "Suppose Alex is a mammal.",
                  "Alex is not cold-blooded.", "This contradicts with Alex is cold-blooded.",
                  "Therefore, Alex is not a mammal."},
                 {},
                 {},
                 {}});
  return out;
}

inline Fixture figure3_fixture() {
  using namespace fx;
  auto mean_not_blue = all(var("mean"), no(var("blue")));
  auto goal = conj({at("mammal", "alex"), no(at("mean", "alex"))});
  ProofTree proof = step(
      RuleTag::ConjIntro, goal,
      {step(RuleTag::ImplicationElim, at("mammal", "alex"),
            {ax(at("dog", "alex")), ax(all(var("dog"), var("mammal")))}),
       step(RuleTag::ProofByContradiction, no(at("mean", "alex")),
            {ax(at("blue", "alex")), step(RuleTag::ImplicationElim, no(at("blue", "alex")),
                                          {ax(mean_not_blue, true), ProofTree::assumption(at("mean", "alex"))}, true)},
            false, {at("mean", "alex")})});
  return {"figure 3",
          {at("dog", "alex"), all(var("dog"), var("mammal")), at("blue", "alex"), mean_not_blue},
          goal,
          proof,
          {"Alex is a dog.", "All dogs are mammals.", "Alex is a mammal.", "Alex is blue.",
           "All mean things are not blue.", "Suppose Alex is mean.", "Alex is not blue.",
           "This contradicts with Alex is blue.", "Therefore, Alex is not mean.", "Alex is a mammal and not mean."},
          {},
          {},
          {}};
}

inline Fixture figure7_fixture() {
  using namespace fx;
  auto p = [](const std::string& pred) { return at(pred, "polly"); };
  auto r1 = all(disj({var("lorpus"), var("brimpus"), var("jompus")}), var("shumpus"));
  auto r2 = all(var("wumpus"), conj({var("vumpus"), var("sterpus"), var("brimpus")}));
  auto r3 = all(disj({var("vumpus"), var("grimpus"), var("brimpus")}), var("lempus"));
  auto r4 = all(disj({var("lempus"), var("jompus"), var("lorpus")}), var("dumpus"));
  auto r5 = all(var("vumpus"), var("rompus"));
  auto r6 = all(var("sterpus"), var("gorpus"));
  auto r7 = all(disj({var("vumpus"), var("grimpus"), var("brimpus")}), var("dumpus"));
  auto r8 = all(var("wumpus"), var("shumpus"));
  auto vsb = conj({p("vumpus"), p("sterpus"), p("brimpus")});
  auto vgb = disj({p("vumpus"), p("grimpus"), p("brimpus")});
  auto goal = disj({p("lempus"), p("impus"), p("yumpus")});

  ProofTree proof = step(
      RuleTag::DisjIntro, goal,
      {step(RuleTag::ImplicationElim, p("lempus"),
            {step(RuleTag::DisjIntro, vgb,
                  {step(RuleTag::ConjElim, p("brimpus"),
                        {step(RuleTag::ImplicationElim, vsb, {ax(p("wumpus")), ax(r2)})})}),
             ax(r3)})});

  Style everything_comma{Quantifier::Everything, ListStyle::Comma};
  Style everything_chain{Quantifier::Everything, ListStyle::Chain};
  Style every{Quantifier::Every, ListStyle::Chain};
  Style bare{Quantifier::Bare, ListStyle::Chain};
  Style comma{Quantifier::All, ListStyle::Comma};
  std::map<std::string, Style> styles = {
      {r1.canonical_key(), everything_comma}, {r2.canonical_key(), every},
      {r3.canonical_key(), everything_comma}, {r4.canonical_key(), everything_chain},
      {r5.canonical_key(), bare},             {r6.canonical_key(), every},
      {r7.canonical_key(), everything_comma}, {r8.canonical_key(), bare},
      {vgb.canonical_key(), comma},           {goal.canonical_key(), comma},
  };

  return {"figure 7",
          {r1, r2, r3, r4, r5, r6, r7, r8, p("rompus"), p("wumpus")},
          goal,
          proof,
          {"Polly is a wumpus.", "Every wumpus is a vumpus and a sterpus and a brimpus.",
           "Polly is a vumpus and a sterpus and a brimpus.", "Polly is a brimpus.",
           "Polly is a vumpus, a grimpus, or a brimpus.",
           "Everything that is a vumpus, a grimpus, or a brimpus is a lempus.", "Polly is a lempus.",
           "Polly is a lempus, an impus, or a yumpus."},
          {"Everything that is a lorpus, a brimpus, or a jompus is a shumpus.",
           "Every wumpus is a vumpus and a sterpus and a brimpus.",
           "Everything that is a vumpus, a grimpus, or a brimpus is a lempus.",
           "Everything that is a lempus or a jompus or a lorpus is a dumpus.", "Vumpuses are rompuses.",
           "Every sterpus is a gorpus.", "Everything that is a vumpus, a grimpus, or a brimpus is a dumpus.",
           "Wumpuses are shumpuses.", "Polly is a rompus.", "Polly is a wumpus."},
          "Polly is a lempus or an impus or a yumpus.",
          styles};
}

/// Context and goal of the shortcut proof that checks only validity would
/// accept; `cot` is that flawed proof.
inline Fixture footnote4_fixture() {
  using namespace fx;
  auto f = [](const std::string& pred) { return at(pred, "fae"); };
  auto r1 = all(var("cat"), var("carnivore"));
  auto r2 = all(var("carnivore"), var("mammal"));
  auto r3 = all(var("carnivore"), no(var("herbivorous")));
  auto goal = no(f("herbivorous"));
  ProofTree proof = step(RuleTag::ImplicationElim, goal,
                         {step(RuleTag::ImplicationElim, f("carnivore"), {ax(f("cat")), ax(r1)}), ax(r3)});
  return {"footnote 4",
          {f("cat"), r1, r2, r3},
          goal,
          proof,
          {"Fae is a cat.", "All cats are carnivores.", "Fae is a carnivore.", "All carnivores are mammals.",
           "Fae is a mammal.", "All mammals are not herbivorous.", "Fae is not herbivorous."},
          {},
          {},
          {}};
}

/// Incorrect predicted answer on an implication example with distractors.
/// `cot` is the prediction; `proof` is the expected answer.
inline Fixture figure10_fixture() {
  using namespace fx;
  auto s = [](const std::string& pred) { return at(pred, "sally"); };
  auto brimpus_grimpus = all(var("brimpus"), var("grimpus"));
  auto grimpus_dull = all(var("grimpus"), var("dull"));
  std::vector<LogicalForm> theory = {
      s("impus"),
      all(var("impus"), var("sterpus")),
      all(var("grimpus"), var("zumpus")),
      brimpus_grimpus,
      all(var("lorpus"), var("dumpus")),
      all(var("brimpus"), var("vumpus")),
      all(var("lorpus"), var("brimpus")),
      s("brimpus"),
      all(var("vumpus"), var("opaque")),
      all(var("dumpus"), no(var("brown"))),
      grimpus_dull,
  };
  ProofTree proof = step(RuleTag::ImplicationElim, s("dull"),
                         {step(RuleTag::ImplicationElim, s("grimpus"), {ax(s("brimpus")), ax(brimpus_grimpus)}),
                          ax(grimpus_dull)});
  return {"figure 10",
          theory,
          s("dull"),
          proof,
          {"Sally is an impus.", "Impuses are sterpuses.", "Every grimpus is a zumpus.", "Every brimpus is a grimpus.",
           "Lorpuses are dumpuses.", "Brimpuses are vumpuses.", "Every lorpus is a brimpus.", "Sally is a brimpus.",
           "Each vumpus is opaque.", "Each dumpus is not brown.", "Every grimpus is dull.", "Sally is a grimpus.",
           "Sally is dull."},
          {},
          {},
          {}};
}

}  // namespace deduce::testing
