#include "deduce/evaluator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace deduce {

std::string_view to_string(StepClass c) {
  switch (c) {
    case StepClass::Axiom: return "axiom";
    case StepClass::StrictlyValid: return "strictly_valid";
    case StepClass::BroadlyValid: return "broadly_valid";
    case StepClass::Invalid: return "invalid";
    case StepClass::ContradictionMarker: return "contradiction_marker";
    case StepClass::Assumption: return "assumption";
  }
  return "invalid";
}

namespace {

using Keys = std::set<std::string>;

struct Record {
  LogicalForm form;
  Keys hyps;  // undischarged hypotheses the conclusion depends on
  bool active = true;
};

struct Derivation {
  int k = -1;
  std::optional<RuleTag> rule;
  std::vector<LogicalForm> premises;
  std::vector<LogicalForm> discharged;
  Keys hyps;
};

Derivation fail() { return {}; }

bool member(const std::vector<LogicalForm>& forms, const LogicalForm& phi) {
  return std::any_of(forms.begin(), forms.end(), [&](const LogicalForm& f) { return equivalent(f, phi); });
}

std::string body_key(const LogicalForm& body, const std::string& variable) {
  return substitute(body, variable, "#").canonical_key();
}

class Checker {
 public:
  Checker(const std::vector<LogicalForm>& axioms, EvalOptions options) : axioms_(axioms), options_(options) {
    for (const auto& a : axioms_) {
      axiom_keys_.insert(a.canonical_key());
      if (!a.is_universal()) continue;
      auto from = body_key(a.antecedent(), a.variable());
      auto to = body_key(a.consequent(), a.variable());
      graph_[from].push_back({to, a});
    }
  }

  bool run(const std::vector<ParsedSentence>& cot, const LogicalForm& goal, std::vector<StepVerdict>* out) {
    std::vector<StepVerdict> verdicts(cot.size());
    for (std::size_t i = 0; i < cot.size(); ++i) {
      verdicts[i].index = i;
      verdicts[i].form = cot[i].form;
      verdicts[i].parsed = cot[i].ok();
    }

    for (std::size_t i = 0; i < cot.size(); ++i) {
      const ParsedSentence& s = cot[i];
      StepVerdict& v = verdicts[i];
      prev_ = i > 0 ? cot[i - 1].form : std::nullopt;
      switch (s.kind) {
        case ParsedSentence::Kind::Unparseable:
          break;
        case ParsedSentence::Kind::Assumption:
          records_.push_back({*s.form, {s.form->canonical_key()}, true});
          v.classification = StepClass::Assumption;
          v.rule = RuleTag::Assumption;
          v.k = 0;
          break;
        case ParsedSentence::Kind::Contradiction:
          if (close_contradiction(cot, i, verdicts)) ++i;
          break;
        case ParsedSentence::Kind::Statement: {
          visiting_.clear();
          // "Since <disjunction>, Y" names its case split; honour it before
          // any other reading, which could leave a case hypothesis open.
          Derivation d = fail();
          if (s.premise_hint && s.premise_hint->is_disjunction()) d = by_cases(*s.form, &*s.premise_hint);
          if (d.k < 0) d = provable(*s.form);
          if (d.k < 0) break;
          for (const auto& h : d.discharged) discharge(h.canonical_key());
          for (const auto& h : d.discharged) d.hyps.erase(h.canonical_key());
          records_.push_back({*s.form, d.hyps, true});
          v.k = d.k;
          v.rule = d.rule;
          v.premises = d.premises;
          v.discharged = d.discharged;
          if (d.rule == RuleTag::Axiom)
            v.classification = StepClass::Axiom;
          else if (d.rule == RuleTag::BroadModusTollens || d.rule == RuleTag::BroadTransitivity)
            v.classification = StepClass::BroadlyValid;
          else
            v.classification = StepClass::StrictlyValid;
          break;
        }
      }
    }
    if (out) *out = std::move(verdicts);
    return std::any_of(records_.begin(), records_.end(), [&](const Record& r) {
      return r.active && r.hyps.empty() && equivalent(r.form, goal);
    });
  }

 private:
  // "This contradicts with X." at index i: the hypothetical conclusion L(i-1)
  // clashes with a known fact, so the negation of a hypothesis it depends on
  // holds. That conclusion is the next sentence, L(i+1).
  bool close_contradiction(const std::vector<ParsedSentence>& cot, std::size_t i, std::vector<StepVerdict>& verdicts) {
    verdicts[i].classification = StepClass::Invalid;
    if (i == 0 || i + 1 >= cot.size()) return false;
    const ParsedSentence& before = cot[i - 1];
    const ParsedSentence& after = cot[i + 1];
    if (!before.form || !after.form || after.kind != ParsedSentence::Kind::Statement) return false;
    const LogicalForm& clash = *before.form;
    const Record* hyp_step = newest(clash);
    if (!hyp_step) return false;

    LogicalForm hypothesis = negate(*after.form);
    if (!hyp_step->hyps.count(hypothesis.canonical_key())) return false;
    // The fact contradicted must be known, and the marker must name one side
    // of the clash.
    LogicalForm fact = negate(clash);
    const Record* fact_step = newest(fact);
    if (!fact_step && !axiom_keys_.count(fact.canonical_key())) return false;
    if (cot[i].form && !equivalent(*cot[i].form, fact) && !equivalent(*cot[i].form, clash)) return false;

    Keys hyps = hyp_step->hyps;
    if (fact_step) hyps.insert(fact_step->hyps.begin(), fact_step->hyps.end());
    hyps.erase(hypothesis.canonical_key());
    discharge(hypothesis.canonical_key());
    records_.push_back({*after.form, hyps, true});

    verdicts[i].classification = StepClass::ContradictionMarker;
    verdicts[i].k = 1;
    StepVerdict& v = verdicts[i + 1];
    v.classification = StepClass::StrictlyValid;
    v.rule = RuleTag::ProofByContradiction;
    v.premises = {clash, fact};
    v.discharged = {hypothesis};
    v.k = 1;
    return true;
  }

  const Record* newest(const LogicalForm& phi) const {
    for (auto it = records_.rbegin(); it != records_.rend(); ++it)
      if (it->active && equivalent(it->form, phi)) return &*it;
    return nullptr;
  }

  bool is_axiom(const LogicalForm& phi) const { return axiom_keys_.count(phi.canonical_key()) > 0; }

  // Closes every conclusion that rests on a discharged hypothesis.
  void discharge(const std::string& key) {
    for (auto& r : records_)
      if (r.hyps.count(key)) r.active = false;
  }

  bool gate(const std::vector<LogicalForm>& premises) const { return prev_ && member(premises, *prev_); }

  struct Candidate {
    const LogicalForm* form;
    const Keys* hyps;  // null for axioms
    bool axiom;
  };

  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    for (auto it = records_.rbegin(); it != records_.rend(); ++it)
      if (it->active) out.push_back({&it->form, &it->hyps, is_axiom(it->form)});
    for (auto it = axioms_.rbegin(); it != axioms_.rend(); ++it) out.push_back({&*it, nullptr, true});
    return out;
  }

  Derivation provable(const LogicalForm& phi) {
    if (visiting_.count(phi.canonical_key()) || visiting_.size() > 24) return fail();
    // Premises of a rule that the chain already stated are taken as stated,
    // so the immediately preceding step can be one of them.
    if (!visiting_.empty() && !is_axiom(phi))
      if (const Record* r = newest(phi)) return {0, std::nullopt, {phi}, {}, r->hyps};
    visiting_.insert(phi.canonical_key());
    Derivation d = search(phi);
    visiting_.erase(phi.canonical_key());
    return d;
  }

  Derivation search(const LogicalForm& phi) {
    if (is_axiom(phi)) return {1, RuleTag::Axiom, {phi}, {}, {}};

    if (phi.is_conjunction()) {
      Derivation out{0, RuleTag::ConjIntro, {}, {}, {}};
      bool all = true;
      for (const auto& op : phi.operands()) {
        Derivation d = provable(op);
        if (d.k < 0) {
          all = false;
          break;
        }
        out.k += d.k;
        for (const auto& p : d.premises) out.premises.push_back(p);
        out.hyps.insert(d.hyps.begin(), d.hyps.end());
      }
      if (all && gate(out.premises)) return out;
    } else if (phi.is_disjunction()) {
      for (const auto& op : phi.operands()) {
        Derivation d = provable(op);
        if (d.k >= 0) return {d.k + 1, RuleTag::DisjIntro, d.premises, {}, d.hyps};
      }
    }

    const auto cands = candidates();
    for (const auto& c : cands) {
      const LogicalForm& a = *c.form;
      if (a.is_conjunction() && member(a.operands(), phi)) {
        Derivation d{1 + (c.axiom ? 1 : 0), RuleTag::ConjElim, {a}, {}, {}};
        if (c.hyps) d.hyps = *c.hyps;
        return d;
      }
      if (a.is_universal() && phi.is_ground() && !phi.is_universal()) {
        for (const auto& e : constants_of(phi)) {
          if (!equivalent(substitute(a.consequent(), a.variable(), e), phi)) continue;
          Derivation d = provable(substitute(a.antecedent(), a.variable(), e));
          if (d.k < 0) continue;
          d.premises.push_back(a);
          if (!gate(d.premises)) continue;
          d.k += c.axiom ? 1 : 0;
          d.rule = RuleTag::ImplicationElim;
          if (c.hyps) d.hyps.insert(c.hyps->begin(), c.hyps->end());
          return d;
        }
      }
    }

    if (auto d = by_cases(phi); d.k >= 0) return d;

    if (options_.broad) {
      for (const auto& c : cands) {
        const LogicalForm& a = *c.form;
        if (!a.is_universal() || !phi.is_ground() || phi.is_universal()) continue;
        for (const auto& e : constants_of(phi)) {
          if (!equivalent(negate(substitute(a.antecedent(), a.variable(), e)), phi)) continue;
          Derivation d = provable(negate(substitute(a.consequent(), a.variable(), e)));
          if (d.k < 0) continue;
          d.premises.push_back(a);
          if (!gate(d.premises)) continue;
          d.k += c.axiom ? 1 : 0;
          d.rule = RuleTag::BroadModusTollens;
          if (c.hyps) d.hyps.insert(c.hyps->begin(), c.hyps->end());
          return d;
        }
      }
    }

    if (const Record* r = newest(phi)) return {0, std::nullopt, {phi}, {}, r->hyps};

    if (options_.broad && phi.is_universal()) {
      if (auto path = find_path(body_key(phi.antecedent(), phi.variable()), body_key(phi.consequent(), phi.variable())))
        return {static_cast<int>(path->size()), RuleTag::BroadTransitivity, *path, {}, {}};
    }
    return fail();
  }

  // Proof by cases: a known disjunction each of whose disjuncts, taken as a
  // hypothesis, has led to phi.
  Derivation by_cases(const LogicalForm& phi, const LogicalForm* only = nullptr) {
    for (const auto& c : candidates()) {
      const LogicalForm& s = *c.form;
      if (!s.is_disjunction() || (only && !equivalent(s, *only))) continue;
      Derivation d{1, RuleTag::DisjElim, {s}, {}, {}};
      if (c.hyps) d.hyps = *c.hyps;
      bool all = true;
      for (const auto& si : s.operands()) {
        const Record* found = nullptr;
        for (auto it = records_.rbegin(); it != records_.rend() && !found; ++it) {
          if (!it->active || !equivalent(it->form, phi) || !it->hyps.count(si.canonical_key())) continue;
          bool other = std::any_of(s.operands().begin(), s.operands().end(), [&](const LogicalForm& sj) {
            return !equivalent(sj, si) && it->hyps.count(sj.canonical_key());
          });
          if (!other) found = &*it;
        }
        if (!found) {
          all = false;
          break;
        }
        d.hyps.insert(found->hyps.begin(), found->hyps.end());
        d.discharged.push_back(si);
      }
      if (all) {
        d.premises.push_back(phi);
        return d;
      }
    }
    return fail();
  }

  std::optional<std::vector<LogicalForm>> find_path(const std::string& from, const std::string& to) const {
    std::map<std::string, std::pair<std::string, const LogicalForm*>> parent;
    std::deque<std::string> queue{from};
    parent[from] = {"", nullptr};
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      auto it = graph_.find(u);
      if (it == graph_.end()) continue;
      for (const auto& [v, rule] : it->second) {
        if (parent.count(v)) continue;
        parent[v] = {u, &rule};
        if (v == to) {
          std::vector<LogicalForm> path;
          for (std::string w = v; w != from; w = parent[w].first) path.push_back(*parent[w].second);
          std::reverse(path.begin(), path.end());
          return path;
        }
        queue.push_back(v);
      }
    }
    return std::nullopt;
  }

  const std::vector<LogicalForm>& axioms_;
  EvalOptions options_;
  std::set<std::string> axiom_keys_;
  std::map<std::string, std::vector<std::pair<std::string, LogicalForm>>> graph_;
  std::vector<Record> records_;
  std::optional<LogicalForm> prev_;
  std::set<std::string> visiting_;
};

}  // namespace

bool evaluate_parsed(const std::vector<LogicalForm>& axioms, const std::vector<ParsedSentence>& cot,
                     const LogicalForm& goal, EvalOptions options, std::vector<StepVerdict>* verdicts) {
  Checker checker(axioms, options);
  return checker.run(cot, goal, verdicts);
}

EvalReport evaluate_cot(const std::vector<std::string>& context, const std::vector<std::string>& cot,
                        const std::string& goal, const Vocabulary& vocab) {
  EvalReport report;
  std::vector<LogicalForm> axioms;
  for (const auto& s : context) {
    auto p = parse_sentence(s, vocab);
    if (p.kind == ParsedSentence::Kind::Statement && p.form)
      axioms.push_back(*p.form);
    else
      ++report.context_parse_failures;
  }
  std::vector<ParsedSentence> steps;
  for (const auto& s : cot) steps.push_back(parse_sentence(s, vocab));

  std::string_view g = goal;
  if (g.substr(0, 6) == "Prove:") g.remove_prefix(6);
  auto goal_parse = parse_sentence(g, vocab);
  report.goal_parsed = goal_parse.kind == ParsedSentence::Kind::Statement && goal_parse.form.has_value();

  std::vector<StepVerdict> broad_verdicts;
  if (report.goal_parsed) {
    bool broad = evaluate_parsed(axioms, steps, *goal_parse.form, {true}, &broad_verdicts);
    bool strict = evaluate_parsed(axioms, steps, *goal_parse.form, {false});
    report.strict_correct = strict;
    // A strict path is also a path under the extended rule set.
    report.overall_correct = broad || strict;
  } else {
    evaluate_parsed(axioms, steps, LogicalForm::atom("unparsed", "goal"), {true}, &broad_verdicts);
  }
  for (std::size_t i = 0; i < broad_verdicts.size(); ++i) broad_verdicts[i].sentence = cot[i];
  report.steps = std::move(broad_verdicts);
  return report;
}

EvalReport score_example(const Example& example, std::string_view predicted_cot, const Vocabulary& vocab) {
  return evaluate_cot(example.question, split_sentences(predicted_cot), example.query_text, vocab);
}

}  // namespace deduce
