#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/example.hpp"
#include "deduce/logic.hpp"
#include "deduce/rng.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Opening of a universal sentence.
///   All:        "All wumpuses are dull."      "All dull things are wumpuses."
///   Every:      "Every wumpus is dull."       "Every dull thing is a wumpus."
///   Each:       "Each wumpus is dull."        "Each dull thing is a wumpus."
///   Bare:       "Wumpuses are dull."          "Dull things are wumpuses."
///   Everything: "Everything that is a wumpus is dull."
/// Antecedents that are not a single positive atom always use Everything.
enum class Quantifier { All, Every, Each, Bare, Everything };

/// "a wumpus and dull and a tumpus" (Chain) or "a wumpus, dull, and a
/// tumpus" (Comma). Two-item lists read the same in both.
enum class ListStyle { Chain, Comma };

struct Style {
  Quantifier quantifier = Quantifier::All;
  ListStyle list = ListStyle::Chain;
  friend bool operator==(const Style&, const Style&) = default;
};

/// Renders a form in the fragment as one sentence ending in a period.
std::string render_form(const LogicalForm& phi, const Vocabulary& vocab, Style style = {});

struct ParsedSentence {
  enum class Kind {
    Statement,
    /// "Suppose X." / "Assume X."
    Assumption,
    /// "This contradicts with X."; `form` holds X when X parses.
    Contradiction,
    Unparseable,
  };
  Kind kind = Kind::Unparseable;
  std::optional<LogicalForm> form;
  /// The X of "Since X, Y." (form then holds Y).
  std::optional<LogicalForm> premise_hint;
  /// Surface choices observed, sufficient to re-render the sentence.
  Style style;

  bool ok() const { return kind != Kind::Unparseable; }
};

/// Deterministic template grammar; never guesses. Unknown words or shapes
/// yield Kind::Unparseable.
ParsedSentence parse_sentence(std::string_view sentence, const Vocabulary& vocab);

/// Splits running text into sentences at periods followed by whitespace or
/// the end of text.
std::vector<std::string> split_sentences(std::string_view text);

using StylePicker = std::function<Style(const LogicalForm&)>;

/// Linearizes a proof tree into chain-of-thought sentences: premises before
/// conclusions, "Suppose X." for assumptions, "This contradicts with X.
/// Therefore, Y." to close a contradiction and "Since X, Y." to close a
/// proof by cases. Leaves are restated.
std::vector<std::string> render_proof(const ProofTree& proof, const Vocabulary& vocab,
                                      const StylePicker& style = nullptr);

/// Reorders a theory for presentation. Random: seeded shuffle. Postorder: rules
/// by a postorder walk of the concept graph (most specific concept first),
/// then ground facts.
std::vector<LogicalForm> order_theory(const std::vector<LogicalForm>& theory, Ordering ordering, Rng& rng);

struct AssembledText {
  std::vector<LogicalForm> theory;
  std::vector<std::string> question;
  std::string query;
  std::vector<std::string> chain_of_thought;
};

/// Orders the theory, picks a surface style per universal (shared by question
/// and chain of thought) and renders everything. The query is rendered
/// without the "Prove:" prefix.
AssembledText assemble_question(const Example& example, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

/// Runs `assemble_question` and stores the result in `example`.
void assemble(Example& example, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

std::string join_sentences(const std::vector<std::string>& sentences);

}  // namespace deduce
