#include "deduce/logic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace deduce {

namespace {

bool body_operand_ok(const LogicalForm& f) { return f.is_literal(); }

// Quantifier bodies: literal, or a flat conjunction/disjunction of literals.
void check_body(const LogicalForm& body, const std::string& variable) {
  if (!body.is_literal() && !body.is_conjunction() && !body.is_disjunction())
    throw FragmentError("quantifier body must be a literal or a flat conjunction/disjunction");
  if (!constants_of(body).empty())
    throw FragmentError("quantifier body mentions a ground entity: " + body.to_sexpr());
  std::function<void(const LogicalForm&)> visit = [&](const LogicalForm& f) {
    switch (f.kind()) {
      case FormKind::Atom:
        if (!f.argument_is_variable() || f.argument() != variable)
          throw FragmentError("quantifier body mentions a foreign variable: " + body.to_sexpr());
        break;
      case FormKind::Negation: visit(f.inner()); break;
      case FormKind::Conjunction:
      case FormKind::Disjunction:
        for (const auto& op : f.operands()) visit(op);
        break;
      case FormKind::UniversalImplication: throw FragmentError("nested quantifier");
    }
  };
  visit(body);
}

std::string join_keys(const char* head, std::vector<std::string> parts, bool sorted) {
  if (sorted) std::sort(parts.begin(), parts.end());
  std::string out = "(";
  out += head;
  for (const auto& p : parts) {
    out += ' ';
    out += p;
  }
  out += ')';
  return out;
}

}  // namespace

LogicalForm LogicalForm::make(Node node) {
  switch (node.kind) {
    case FormKind::Atom: {
      std::string arg = node.variable ? "?" + node.argument : node.argument;
      node.sexpr = "(" + node.predicate + " " + arg + ")";
      node.key = node.sexpr;
      break;
    }
    case FormKind::Negation:
      node.sexpr = "(not " + node.operands[0].to_sexpr() + ")";
      node.key = "(not " + node.operands[0].canonical_key() + ")";
      break;
    case FormKind::Conjunction:
    case FormKind::Disjunction: {
      const char* head = node.kind == FormKind::Conjunction ? "and" : "or";
      std::vector<std::string> structural, keys;
      for (const auto& op : node.operands) {
        structural.push_back(op.to_sexpr());
        keys.push_back(op.canonical_key());
      }
      node.sexpr = join_keys(head, structural, false);
      node.key = join_keys(head, keys, true);
      break;
    }
    case FormKind::UniversalImplication:
      node.sexpr = "(forall ?" + node.argument + " " + node.operands[0].to_sexpr() + " " +
                   node.operands[1].to_sexpr() + ")";
      node.key = "(forall ?" + node.argument + " " + node.operands[0].canonical_key() + " " +
                 node.operands[1].canonical_key() + ")";
      break;
  }
  return LogicalForm(std::make_shared<const Node>(std::move(node)));
}

static void check_symbol(const std::string& s, const char* what) {
  if (s.empty()) throw FragmentError(std::string("empty ") + what);
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '?')
      throw FragmentError(std::string("invalid character in ") + what + ": '" + s + "'");
}

LogicalForm LogicalForm::atom(std::string predicate, std::string constant) {
  check_symbol(predicate, "predicate");
  check_symbol(constant, "constant");
  Node n{FormKind::Atom, std::move(predicate), std::move(constant), false, {}, {}, {}};
  return make(std::move(n));
}

LogicalForm LogicalForm::variable_atom(std::string predicate, std::string variable) {
  check_symbol(predicate, "predicate");
  check_symbol(variable, "variable");
  Node n{FormKind::Atom, std::move(predicate), std::move(variable), true, {}, {}, {}};
  return make(std::move(n));
}

LogicalForm LogicalForm::negation(LogicalForm inner) {
  if (!inner.is_atom() && !inner.is_universal())
    throw FragmentError("negation applies to atoms only: " + inner.to_sexpr());
  Node n{FormKind::Negation, {}, {}, false, {std::move(inner)}, {}, {}};
  return make(std::move(n));
}

LogicalForm LogicalForm::conjunction(std::vector<LogicalForm> operands) {
  if (operands.size() < 2) throw FragmentError("conjunction needs at least two operands");
  for (const auto& op : operands)
    if (!body_operand_ok(op)) throw FragmentError("conjunction operands must be literals: " + op.to_sexpr());
  Node n{FormKind::Conjunction, {}, {}, false, std::move(operands), {}, {}};
  return make(std::move(n));
}

LogicalForm LogicalForm::disjunction(std::vector<LogicalForm> operands) {
  if (operands.size() < 2) throw FragmentError("disjunction needs at least two operands");
  for (const auto& op : operands)
    if (!body_operand_ok(op)) throw FragmentError("disjunction operands must be literals: " + op.to_sexpr());
  Node n{FormKind::Disjunction, {}, {}, false, std::move(operands), {}, {}};
  return make(std::move(n));
}

LogicalForm LogicalForm::universal(std::string variable, LogicalForm antecedent, LogicalForm consequent) {
  check_symbol(variable, "variable");
  check_body(antecedent, variable);
  check_body(consequent, variable);
  Node n{FormKind::UniversalImplication, {}, std::move(variable), true,
         {std::move(antecedent), std::move(consequent)}, {}, {}};
  return make(std::move(n));
}

bool LogicalForm::is_literal() const { return is_atom() || (is_negation() && inner().is_atom()); }

bool LogicalForm::is_ground() const {
  switch (kind()) {
    case FormKind::Atom: return !argument_is_variable();
    case FormKind::Negation: return inner().is_ground();
    case FormKind::Conjunction:
    case FormKind::Disjunction:
      return std::all_of(operands().begin(), operands().end(), [](const auto& f) { return f.is_ground(); });
    case FormKind::UniversalImplication: return false;
  }
  return false;
}

const std::string& LogicalForm::predicate() const {
  if (!is_atom()) throw std::logic_error("predicate() on non-atom " + to_sexpr());
  return node_->predicate;
}
const std::string& LogicalForm::argument() const {
  if (!is_atom()) throw std::logic_error("argument() on non-atom " + to_sexpr());
  return node_->argument;
}
bool LogicalForm::argument_is_variable() const { return is_atom() && node_->variable; }

const LogicalForm& LogicalForm::inner() const {
  if (!is_negation()) throw std::logic_error("inner() on non-negation " + to_sexpr());
  return node_->operands[0];
}
const std::vector<LogicalForm>& LogicalForm::operands() const {
  if (!is_conjunction() && !is_disjunction()) throw std::logic_error("operands() on " + to_sexpr());
  return node_->operands;
}
const std::string& LogicalForm::variable() const {
  if (!is_universal()) throw std::logic_error("variable() on non-universal " + to_sexpr());
  return node_->argument;
}
const LogicalForm& LogicalForm::antecedent() const {
  if (!is_universal()) throw std::logic_error("antecedent() on non-universal " + to_sexpr());
  return node_->operands[0];
}
const LogicalForm& LogicalForm::consequent() const {
  if (!is_universal()) throw std::logic_error("consequent() on non-universal " + to_sexpr());
  return node_->operands[1];
}

LogicalForm negate(const LogicalForm& phi) {
  switch (phi.kind()) {
    case FormKind::Negation: return phi.inner();
    case FormKind::Disjunction: {
      std::vector<LogicalForm> ops;
      for (const auto& op : phi.operands()) ops.push_back(negate(op));
      return LogicalForm::conjunction(std::move(ops));
    }
    case FormKind::Conjunction: {
      std::vector<LogicalForm> ops;
      for (const auto& op : phi.operands()) ops.push_back(negate(op));
      return LogicalForm::disjunction(std::move(ops));
    }
    default: return LogicalForm::negation(phi);
  }
}

bool equivalent(const LogicalForm& phi, const LogicalForm& psi) { return phi.canonical_key() == psi.canonical_key(); }

namespace {

LogicalForm map_atoms(const LogicalForm& phi, const std::function<LogicalForm(const LogicalForm&)>& f) {
  switch (phi.kind()) {
    case FormKind::Atom: return f(phi);
    case FormKind::Negation: return LogicalForm::negation(map_atoms(phi.inner(), f));
    case FormKind::Conjunction:
    case FormKind::Disjunction: {
      std::vector<LogicalForm> ops;
      for (const auto& op : phi.operands()) ops.push_back(map_atoms(op, f));
      return phi.is_conjunction() ? LogicalForm::conjunction(std::move(ops))
                                  : LogicalForm::disjunction(std::move(ops));
    }
    case FormKind::UniversalImplication:
      return LogicalForm::universal(phi.variable(), map_atoms(phi.antecedent(), f), map_atoms(phi.consequent(), f));
  }
  return phi;
}

}  // namespace

LogicalForm substitute(const LogicalForm& phi, std::string_view variable, std::string_view entity) {
  if (phi.is_universal()) return phi;
  return map_atoms(phi, [&](const LogicalForm& a) {
    if (!a.argument_is_variable()) return a;
    if (a.argument() != variable)
      throw FragmentError("unexpected free variable '" + a.argument() + "' in " + phi.to_sexpr());
    return LogicalForm::atom(a.predicate(), std::string(entity));
  });
}

LogicalForm generalize(const LogicalForm& phi, std::string_view entity, std::string_view variable) {
  if (phi.is_universal()) return phi;
  return map_atoms(phi, [&](const LogicalForm& a) {
    if (a.argument_is_variable() || a.argument() != entity) return a;
    return LogicalForm::variable_atom(a.predicate(), std::string(variable));
  });
}

namespace {
void collect(const LogicalForm& phi, std::set<std::string>* constants, std::set<std::string>* predicates) {
  switch (phi.kind()) {
    case FormKind::Atom:
      if (predicates) predicates->insert(phi.predicate());
      if (constants && !phi.argument_is_variable()) constants->insert(phi.argument());
      break;
    case FormKind::Negation: collect(phi.inner(), constants, predicates); break;
    case FormKind::Conjunction:
    case FormKind::Disjunction:
      for (const auto& op : phi.operands()) collect(op, constants, predicates);
      break;
    case FormKind::UniversalImplication:
      collect(phi.antecedent(), constants, predicates);
      collect(phi.consequent(), constants, predicates);
      break;
  }
}
}  // namespace

std::set<std::string> constants_of(const LogicalForm& phi) {
  std::set<std::string> out;
  collect(phi, &out, nullptr);
  return out;
}

std::set<std::string> predicates_of(const LogicalForm& phi) {
  std::set<std::string> out;
  collect(phi, nullptr, &out);
  return out;
}

// --- s-expression reader ----------------------------------------------------

namespace {

class SexprReader {
 public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  LogicalForm read_form() {
    expect('(');
    std::string head = read_symbol();
    if (head == "not") {
      auto inner = read_form();
      expect(')');
      return LogicalForm::negation(std::move(inner));
    }
    if (head == "and" || head == "or") {
      std::vector<LogicalForm> ops;
      while (peek() == '(') ops.push_back(read_form());
      expect(')');
      return head == "and" ? LogicalForm::conjunction(std::move(ops)) : LogicalForm::disjunction(std::move(ops));
    }
    if (head == "forall") {
      std::string var = read_symbol();
      if (var.size() < 2 || var[0] != '?') fail("expected ?variable after forall");
      auto antecedent = read_form();
      auto consequent = read_form();
      expect(')');
      return LogicalForm::universal(var.substr(1), std::move(antecedent), std::move(consequent));
    }
    std::string arg = read_symbol();
    expect(')');
    if (!arg.empty() && arg[0] == '?') return LogicalForm::variable_atom(head, arg.substr(1));
    return LogicalForm::atom(head, arg);
  }

  void finish() {
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string read_symbol() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected symbol");
    return std::string(text_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& what) {
    throw FragmentError("s-expression parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LogicalForm parse_sexpr(std::string_view text) {
  SexprReader reader(text);
  auto form = reader.read_form();
  reader.finish();
  return form;
}

// --- proofs -----------------------------------------------------------------

std::string_view to_string(RuleTag tag) {
  switch (tag) {
    case RuleTag::Axiom: return "axiom";
    case RuleTag::ImplicationElim: return "implication_elimination";
    case RuleTag::ConjIntro: return "conjunction_introduction";
    case RuleTag::ConjElim: return "conjunction_elimination";
    case RuleTag::DisjIntro: return "disjunction_introduction";
    case RuleTag::DisjElim: return "disjunction_elimination";
    case RuleTag::ProofByContradiction: return "proof_by_contradiction";
    case RuleTag::Assumption: return "assumption";
    case RuleTag::BroadTransitivity: return "broad_transitivity";
    case RuleTag::BroadModusTollens: return "broad_modus_tollens";
  }
  return "unknown";
}

std::optional<RuleTag> rule_tag_from_string(std::string_view name) {
  for (auto tag : {RuleTag::Axiom, RuleTag::ImplicationElim, RuleTag::ConjIntro, RuleTag::ConjElim, RuleTag::DisjIntro,
                   RuleTag::DisjElim, RuleTag::ProofByContradiction, RuleTag::Assumption, RuleTag::BroadTransitivity,
                   RuleTag::BroadModusTollens})
    if (to_string(tag) == name) return tag;
  return std::nullopt;
}

const std::vector<RuleTag>& deduction_rules() {
  static const std::vector<RuleTag> rules = {RuleTag::ImplicationElim, RuleTag::ConjIntro, RuleTag::ConjElim,
                                             RuleTag::DisjIntro,       RuleTag::DisjElim,  RuleTag::ProofByContradiction};
  return rules;
}

ProofTree ProofTree::axiom(LogicalForm conclusion, bool hypothetical) {
  return ProofTree{RuleTag::Axiom, std::move(conclusion), {}, hypothetical, {}};
}

ProofTree ProofTree::assumption(LogicalForm conclusion) {
  return ProofTree{RuleTag::Assumption, std::move(conclusion), {}, true, {}};
}

ProofTree ProofTree::step(RuleTag rule, LogicalForm conclusion, std::vector<ProofTree> premises, bool hypothetical,
                          std::vector<LogicalForm> discharged) {
  return ProofTree{rule, std::move(conclusion), std::move(premises), hypothetical, std::move(discharged)};
}

bool operator==(const ProofTree& a, const ProofTree& b) {
  return a.rule == b.rule && a.conclusion == b.conclusion && a.hypothetical == b.hypothetical &&
         a.discharged == b.discharged && a.premises == b.premises;
}

namespace {

std::size_t step_arity(const ProofTree& node) {
  switch (node.rule) {
    case RuleTag::ConjIntro: return node.premises.size();
    case RuleTag::ConjElim:
      for (const auto& p : node.premises)
        if (p.conclusion.is_conjunction()) return p.conclusion.operands().size();
      return 1;
    case RuleTag::DisjIntro:
      return node.conclusion.is_disjunction() ? node.conclusion.operands().size() : 1;
    case RuleTag::DisjElim: return std::max<std::size_t>(node.discharged.size(), 1);
    default: return 1;
  }
}

}  // namespace

ProofMetrics tree_metrics(const ProofTree& proof) {
  ProofMetrics m;
  if (proof.is_leaf()) return m;
  m.rule_types.insert(proof.rule);
  m.width = proof.premises.size();
  m.arity = step_arity(proof);
  std::size_t child_depth = 0, child_hops = 0;
  for (const auto& p : proof.premises) {
    auto sub = tree_metrics(p);
    child_depth = std::max(child_depth, sub.depth);
    child_hops = std::max(child_hops, sub.hop_depth);
    m.width = std::max(m.width, sub.width);
    m.arity = std::max(m.arity, sub.arity);
    m.rule_types.insert(sub.rule_types.begin(), sub.rule_types.end());
  }
  m.depth = child_depth + 1;
  m.hop_depth = child_hops + (proof.rule == RuleTag::ImplicationElim ? 1 : 0);
  return m;
}

namespace {

void collect_leaves(const ProofTree& node, RuleTag tag, std::vector<LogicalForm>& out) {
  for (const auto& p : node.premises) collect_leaves(p, tag, out);
  if (node.rule == tag && std::none_of(out.begin(), out.end(), [&](const auto& f) { return equivalent(f, node.conclusion); }))
    out.push_back(node.conclusion);
}

// Returns false on a leaf-discipline violation. `pending` holds hypotheses
// discharged by ancestors.
bool check_discharge(const ProofTree& node, std::vector<std::string>& pending) {
  if (node.rule == RuleTag::Assumption) {
    return std::find(pending.begin(), pending.end(), node.conclusion.canonical_key()) != pending.end();
  }
  std::size_t mark = pending.size();
  for (const auto& d : node.discharged) {
    if (std::find(pending.begin(), pending.end(), d.canonical_key()) != pending.end()) return false;
    pending.push_back(d.canonical_key());
  }
  for (const auto& p : node.premises)
    if (!check_discharge(p, pending)) return false;
  for (const auto& d : node.discharged) {
    std::vector<LogicalForm> found;
    collect_leaves(node, RuleTag::Assumption, found);
    if (std::none_of(found.begin(), found.end(), [&](const auto& f) { return equivalent(f, d); })) return false;
  }
  pending.resize(mark);
  return true;
}

}  // namespace

std::vector<LogicalForm> proof_axioms(const ProofTree& proof) {
  std::vector<LogicalForm> out;
  collect_leaves(proof, RuleTag::Axiom, out);
  return out;
}

std::vector<LogicalForm> proof_assumptions(const ProofTree& proof) {
  std::vector<LogicalForm> out;
  collect_leaves(proof, RuleTag::Assumption, out);
  return out;
}

bool assumptions_discharged(const ProofTree& proof) {
  std::vector<std::string> pending;
  return check_discharge(proof, pending);
}

}  // namespace deduce
