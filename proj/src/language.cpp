#include "deduce/language.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace deduce {

namespace {

constexpr std::string_view kVar = "x";

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string strip_period(std::string s) {
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

std::string literal_phrase(const LogicalForm& lit, const Vocabulary& vocab, bool plural) {
  if (lit.is_negation()) return "not " + literal_phrase(lit.inner(), vocab, plural);
  if (!lit.is_atom()) throw RenderError("not a literal: " + lit.to_sexpr());
  const std::string& p = lit.predicate();
  auto pos = vocab.part_of_speech(p);
  if (!pos) throw RenderError("unknown predicate: " + p);
  if (*pos == PartOfSpeech::Adjective) return p;
  if (plural) return vocab.plural(p);
  return std::string(Vocabulary::article(p)) + " " + p;
}

std::string join_list(const std::vector<std::string>& items, std::string_view word, ListStyle style) {
  if (items.size() == 1) return items[0];
  std::string out;
  if (items.size() == 2 || style == ListStyle::Chain) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += " " + std::string(word) + " ";
      out += items[i];
    }
    return out;
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    if (i + 1 == items.size()) out += std::string(word) + " ";
    out += items[i];
  }
  return out;
}

std::string body_phrase(const LogicalForm& body, const Vocabulary& vocab, bool plural, ListStyle style) {
  if (body.is_literal()) return literal_phrase(body, vocab, plural);
  if (!body.is_conjunction() && !body.is_disjunction()) throw RenderError("unsupported body: " + body.to_sexpr());
  std::vector<std::string> items;
  for (const auto& op : body.operands()) items.push_back(literal_phrase(op, vocab, plural));
  return join_list(items, body.is_conjunction() ? "and" : "or", style);
}

std::string subject_of(const LogicalForm& ground, const Vocabulary& vocab) {
  auto constants = constants_of(ground);
  if (constants.size() != 1) throw RenderError("ground sentence needs exactly one entity: " + ground.to_sexpr());
  return vocab.display_name(*constants.begin());
}

// ---------------------------------------------------------------------------
// Parsing

using Tokens = std::vector<std::string>;

Tokens tokenize(std::string_view s) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      flush();
    } else if (c == ',') {
      flush();
      out.emplace_back(",");
    } else {
      cur.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  flush();
  return out;
}

struct Lit {
  std::string predicate;
  bool negated = false;
};

struct ParsedList {
  std::vector<Lit> items;
  enum class Conn { None, And, Or } conn = Conn::None;
  bool comma = false;
};

std::optional<Lit> parse_item(const Tokens& t, std::size_t b, std::size_t e, bool plural, const Vocabulary& vocab) {
  Lit lit;
  if (b < e && t[b] == "not") {
    lit.negated = true;
    ++b;
  }
  if (plural) {
    if (e - b != 1) return std::nullopt;
    if (auto noun = vocab.noun_from_plural(t[b])) {
      lit.predicate = *noun;
      return lit;
    }
    if (vocab.part_of_speech(t[b]) == PartOfSpeech::Adjective) {
      lit.predicate = t[b];
      return lit;
    }
    return std::nullopt;
  }
  if (e - b == 2 && (t[b] == "a" || t[b] == "an") && vocab.part_of_speech(t[b + 1]) == PartOfSpeech::Noun) {
    lit.predicate = t[b + 1];
    return lit;
  }
  if (e - b == 1 && vocab.part_of_speech(t[b]) == PartOfSpeech::Adjective) {
    lit.predicate = t[b];
    return lit;
  }
  return std::nullopt;
}

std::optional<ParsedList> parse_list(const Tokens& t, std::size_t b, std::size_t e, bool plural,
                                     const Vocabulary& vocab) {
  ParsedList out;
  std::size_t i = b;
  bool last_group_had_word = false;
  while (true) {
    std::size_t j = i;
    while (j < e && t[j] != "," && t[j] != "and" && t[j] != "or") ++j;
    if (j == i) return std::nullopt;
    auto item = parse_item(t, i, j, plural, vocab);
    if (!item) return std::nullopt;
    out.items.push_back(*item);
    if (j == e) break;
    last_group_had_word = false;
    while (j < e && (t[j] == "," || t[j] == "and" || t[j] == "or")) {
      if (t[j] == ",") {
        if (last_group_had_word) return std::nullopt;  // "and ," is not a separator
        out.comma = true;
      } else {
        if (last_group_had_word) return std::nullopt;
        auto conn = t[j] == "and" ? ParsedList::Conn::And : ParsedList::Conn::Or;
        if (out.conn != ParsedList::Conn::None && out.conn != conn) return std::nullopt;
        out.conn = conn;
        last_group_had_word = true;
      }
      ++j;
    }
    i = j;
  }
  if (out.items.size() > 1 && !last_group_had_word) return std::nullopt;
  return out;
}

LogicalForm build_literal(const Lit& lit, std::string_view arg, bool variable) {
  LogicalForm a = variable ? LogicalForm::variable_atom(lit.predicate, std::string(arg))
                           : LogicalForm::atom(lit.predicate, std::string(arg));
  return lit.negated ? LogicalForm::negation(a) : a;
}

LogicalForm build_body(const ParsedList& list, std::string_view arg, bool variable) {
  if (list.items.size() == 1) return build_literal(list.items[0], arg, variable);
  std::vector<LogicalForm> ops;
  for (const auto& lit : list.items) ops.push_back(build_literal(lit, arg, variable));
  return list.conn == ParsedList::Conn::And ? LogicalForm::conjunction(std::move(ops))
                                            : LogicalForm::disjunction(std::move(ops));
}

struct Statement {
  LogicalForm form;
  Style style;
};

std::optional<Statement> parse_statement(const Tokens& t, std::size_t b, std::size_t e, const Vocabulary& vocab) {
  auto n = e - b;
  if (n < 3) return std::nullopt;
  auto at = [&](std::size_t k) -> const std::string& { return t[b + k]; };
  auto is_noun = [&](const std::string& w) { return vocab.part_of_speech(w) == PartOfSpeech::Noun; };
  auto is_adj = [&](const std::string& w) { return vocab.part_of_speech(w) == PartOfSpeech::Adjective; };

  auto universal = [&](const Lit& ant, Quantifier q, std::size_t cons_begin,
                       bool plural) -> std::optional<Statement> {
    auto cons = parse_list(t, b + cons_begin, e, plural, vocab);
    if (!cons) return std::nullopt;
    Style style{q, cons->comma ? ListStyle::Comma : ListStyle::Chain};
    return Statement{LogicalForm::universal(std::string(kVar), build_literal(ant, kVar, true),
                                            build_body(*cons, kVar, true)),
                     style};
  };

  // Ground: "<Name> is <list>".
  if (auto entity = vocab.entity_from_name(at(0)); entity && at(1) == "is") {
    auto list = parse_list(t, b + 2, e, false, vocab);
    if (!list) return std::nullopt;
    return Statement{build_body(*list, *entity, false),
                     Style{Quantifier::All, list->comma ? ListStyle::Comma : ListStyle::Chain}};
  }
  // "Every/Each N is ..." and "Every/Each ADJ thing is ...".
  if (at(0) == "every" || at(0) == "each") {
    Quantifier q = at(0) == "every" ? Quantifier::Every : Quantifier::Each;
    if (is_noun(at(1)) && at(2) == "is") return universal({at(1)}, q, 3, false);
    if (n > 3 && is_adj(at(1)) && at(2) == "thing" && at(3) == "is") return universal({at(1)}, q, 4, false);
    return std::nullopt;
  }
  // "All Ns are ..." and "All ADJ things are ...".
  if (at(0) == "all") {
    if (auto noun = vocab.noun_from_plural(at(1)); noun && at(2) == "are")
      return universal({*noun}, Quantifier::All, 3, true);
    if (n > 3 && is_adj(at(1)) && at(2) == "things" && at(3) == "are")
      return universal({at(1)}, Quantifier::All, 4, true);
    return std::nullopt;
  }
  // "Everything that is <list> is <list>".
  if (at(0) == "everything" && at(1) == "that" && at(2) == "is") {
    for (std::size_t k = b + 3; k < e; ++k) {
      if (t[k] != "is") continue;
      auto ant = parse_list(t, b + 3, k, false, vocab);
      auto cons = parse_list(t, k + 1, e, false, vocab);
      if (!ant || !cons) return std::nullopt;
      bool comma = ant->comma || cons->comma;
      return Statement{LogicalForm::universal(std::string(kVar), build_body(*ant, kVar, true),
                                              build_body(*cons, kVar, true)),
                       Style{Quantifier::Everything, comma ? ListStyle::Comma : ListStyle::Chain}};
    }
    return std::nullopt;
  }
  // Bare plurals: "Ns are ..." and "ADJ things are ...".
  if (auto noun = vocab.noun_from_plural(at(0)); noun && at(1) == "are")
    return universal({*noun}, Quantifier::Bare, 2, true);
  if (is_adj(at(0)) && at(1) == "things" && at(2) == "are") return universal({at(0)}, Quantifier::Bare, 3, true);
  return std::nullopt;
}

std::optional<Statement> parse_statement_safe(const Tokens& t, std::size_t b, std::size_t e,
                                              const Vocabulary& vocab) {
  try {
    return parse_statement(t, b, e, vocab);
  } catch (const FragmentError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string render_form(const LogicalForm& phi, const Vocabulary& vocab, Style style) {
  if (phi.is_ground()) {
    if (phi.is_universal()) throw RenderError("unsupported shape: " + phi.to_sexpr());
    if (phi.is_negation() && !phi.inner().is_atom()) throw RenderError("unsupported shape: " + phi.to_sexpr());
    return subject_of(phi, vocab) + " is " + body_phrase(phi, vocab, false, style.list) + ".";
  }
  if (!phi.is_universal()) throw RenderError("unsupported shape: " + phi.to_sexpr());

  const LogicalForm& ant = phi.antecedent();
  const LogicalForm& cons = phi.consequent();
  auto sg = [&] { return body_phrase(cons, vocab, false, style.list); };
  auto pl = [&] { return body_phrase(cons, vocab, true, style.list); };

  if (!ant.is_atom() || style.quantifier == Quantifier::Everything)
    return "Everything that is " + body_phrase(ant, vocab, false, style.list) + " is " + sg() + ".";

  const std::string& p = ant.predicate();
  auto pos = vocab.part_of_speech(p);
  if (!pos) throw RenderError("unknown predicate: " + p);
  bool noun = *pos == PartOfSpeech::Noun;
  std::string sg_subject = noun ? p : p + " thing";
  std::string pl_subject = noun ? vocab.plural(p) : p + " things";
  switch (style.quantifier) {
    case Quantifier::All:
      return "All " + pl_subject + " are " + pl() + ".";
    case Quantifier::Bare:
      return capitalize(pl_subject) + " are " + pl() + ".";
    case Quantifier::Every:
      return "Every " + sg_subject + " is " + sg() + ".";
    case Quantifier::Each:
      return "Each " + sg_subject + " is " + sg() + ".";
    case Quantifier::Everything:
      break;
  }
  throw RenderError("unreachable quantifier");
}

ParsedSentence parse_sentence(std::string_view sentence, const Vocabulary& vocab) {
  ParsedSentence out;
  std::string_view s = sentence;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  Tokens t = tokenize(s);
  if (t.empty()) return out;

  auto set = [&](ParsedSentence::Kind kind, const Statement& st) {
    out.kind = kind;
    out.form = st.form;
    out.style = st.style;
    return out;
  };

  if (t[0] == "suppose" || t[0] == "assume") {
    auto st = parse_statement_safe(t, 1, t.size(), vocab);
    if (!st) return out;
    return set(ParsedSentence::Kind::Assumption, *st);
  }
  if (t.size() >= 3 && t[0] == "this" && t[1] == "contradicts" && t[2] == "with") {
    out.kind = ParsedSentence::Kind::Contradiction;
    if (auto st = parse_statement_safe(t, 3, t.size(), vocab)) {
      out.form = st->form;
      out.style = st->style;
    }
    return out;
  }
  if (t[0] == "since") {
    for (std::size_t k = 1; k < t.size(); ++k) {
      if (t[k] != ",") continue;
      auto premise = parse_statement_safe(t, 1, k, vocab);
      if (!premise) continue;
      auto conclusion = parse_statement_safe(t, k + 1, t.size(), vocab);
      if (!conclusion) continue;
      set(ParsedSentence::Kind::Statement, *conclusion);
      out.premise_hint = premise->form;
      return out;
    }
    return out;
  }
  std::size_t b = 0;
  if (t[0] == "therefore" || t[0] == "thus" || t[0] == "hence" || t[0] == "so") {
    b = 1;
    if (b < t.size() && t[b] == ",") ++b;
  }
  if (auto st = parse_statement_safe(t, b, t.size(), vocab)) return set(ParsedSentence::Kind::Statement, *st);
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::size_t a = cur.find_first_not_of(" \t\r\n");
    if (a != std::string::npos) {
      std::size_t z = cur.find_last_not_of(" \t\r\n");
      out.push_back(cur.substr(a, z - a + 1));
    }
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur.push_back(text[i]);
    if (text[i] == '.' && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) flush();
  }
  flush();
  return out;
}

std::vector<std::string> render_proof(const ProofTree& proof, const Vocabulary& vocab, const StylePicker& style) {
  std::vector<std::string> out;
  auto render = [&](const LogicalForm& phi) { return render_form(phi, vocab, style ? style(phi) : Style{}); };
  std::function<void(const ProofTree&)> emit = [&](const ProofTree& node) {
    switch (node.rule) {
      case RuleTag::Axiom:
        out.push_back(render(node.conclusion));
        return;
      case RuleTag::Assumption:
        out.push_back("Suppose " + render(node.conclusion));
        return;
      case RuleTag::DisjElim: {
        if (node.premises.empty()) throw RenderError("proof by cases without premises");
        for (const auto& p : node.premises) emit(p);
        out.push_back("Since " + strip_period(render(node.premises[0].conclusion)) + ", " +
                      render(node.conclusion));
        return;
      }
      case RuleTag::ProofByContradiction: {
        if (node.premises.size() != 2) throw RenderError("contradiction needs two premises");
        emit(node.premises[0]);
        emit(node.premises[1]);
        out.push_back("This contradicts with " + render(node.premises[0].conclusion));
        out.push_back("Therefore, " + render(node.conclusion));
        return;
      }
      default:
        for (const auto& p : node.premises) emit(p);
        out.push_back(render(node.conclusion));
    }
  };
  emit(proof);
  return out;
}

std::vector<LogicalForm> order_theory(const std::vector<LogicalForm>& theory, Ordering ordering, Rng& rng) {
  std::vector<LogicalForm> out = theory;
  if (ordering == Ordering::Random) {
    rng.shuffle(out);
    return out;
  }

  std::vector<std::size_t> rules, facts;
  for (std::size_t i = 0; i < theory.size(); ++i) (theory[i].is_universal() ? rules : facts).push_back(i);

  // children[q] = predicates p with a rule p -> q (first-appearance order).
  std::map<std::string, std::vector<std::string>> children;
  std::vector<std::string> concept_order;
  std::set<std::string> seen_concept, has_parent;
  auto note = [&](const std::string& p) {
    if (seen_concept.insert(p).second) concept_order.push_back(p);
  };
  for (std::size_t r : rules) {
    auto ant = predicates_of(theory[r].antecedent());
    auto cons = predicates_of(theory[r].consequent());
    for (const auto& p : ant) note(p);
    for (const auto& q : cons) note(q);
    for (const auto& q : cons)
      for (const auto& p : ant) {
        auto& kids = children[q];
        if (std::find(kids.begin(), kids.end(), p) == kids.end()) kids.push_back(p);
        has_parent.insert(p);
      }
  }

  std::set<std::string> visited;
  std::vector<bool> emitted(theory.size(), false);
  out.clear();
  auto emit_ready = [&] {
    for (std::size_t r : rules) {
      if (emitted[r]) continue;
      auto ant = predicates_of(theory[r].antecedent());
      if (std::all_of(ant.begin(), ant.end(), [&](const std::string& p) { return visited.count(p) > 0; })) {
        emitted[r] = true;
        out.push_back(theory[r]);
      }
    }
  };
  std::set<std::string> on_stack;
  std::function<void(const std::string&)> visit = [&](const std::string& q) {
    if (visited.count(q) || on_stack.count(q)) return;
    on_stack.insert(q);
    for (const auto& p : children[q]) visit(p);
    on_stack.erase(q);
    visited.insert(q);
    emit_ready();
  };
  for (const auto& c : concept_order)
    if (!has_parent.count(c)) visit(c);
  for (const auto& c : concept_order) visit(c);
  for (std::size_t r : rules)
    if (!emitted[r]) out.push_back(theory[r]);
  for (std::size_t f : facts) out.push_back(theory[f]);
  return out;
}

AssembledText assemble_question(const Example& example, Rng& rng, const Vocabulary& vocab) {
  AssembledText out;
  out.theory = order_theory(example.theory, example.params.ordering, rng);

  std::map<std::string, Style> chosen;
  StylePicker picker = [&](const LogicalForm& phi) {
    auto it = chosen.find(phi.canonical_key());
    if (it != chosen.end()) return it->second;
    Style style;
    style.list = rng.coin() ? ListStyle::Comma : ListStyle::Chain;
    if (phi.is_universal()) {
      static const std::vector<Quantifier> simple = {Quantifier::All, Quantifier::Every, Quantifier::Each,
                                                     Quantifier::Bare};
      style.quantifier = phi.antecedent().is_atom() ? rng.pick(simple) : Quantifier::Everything;
    }
    chosen.emplace(phi.canonical_key(), style);
    return style;
  };

  for (const auto& phi : out.theory) out.question.push_back(render_form(phi, vocab, picker(phi)));
  out.chain_of_thought = render_proof(example.gold_proof, vocab, picker);
  out.query = render_form(example.query, vocab, picker(example.query));
  return out;
}

void assemble(Example& example, Rng& rng, const Vocabulary& vocab) {
  AssembledText text = assemble_question(example, rng, vocab);
  example.theory = std::move(text.theory);
  example.question = std::move(text.question);
  example.query_text = std::move(text.query);
  example.chain_of_thought = std::move(text.chain_of_thought);
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace deduce
