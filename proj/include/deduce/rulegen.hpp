#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "deduce/example.hpp"
#include "deduce/logic.hpp"
#include "deduce/rng.hpp"
#include "deduce/vocabulary.hpp"

namespace deduce {

/// Raised for parameter combinations a generator does not support.
class GenerationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Chain of concepts, each the subtype of the next, with one entity that is
/// a member of the first.
struct Ontology {
  std::vector<std::string> concepts;
  std::map<std::string, std::string> supertype;
  std::string entity;
  std::vector<LogicalForm> ground_memberships;

  /// ∀x(c_i(x) → c_{i+1}(x)) for every edge, in chain order.
  std::vector<LogicalForm> rules() const;
};

Ontology generate_linear_ontology(std::size_t length, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

/// Throws GenerationError unless the rule/depth/width combination is valid.
void validate(const GenParams& params);

/// Builds the example, adds distractors if requested and renders the text.
/// The draws come from `rng`; `params.seed` is only recorded.
Example generate_rule_example(const GenParams& params, Rng& rng, const Vocabulary& vocab = Vocabulary::standard());

/// Same, seeded from `params.seed`.
Example generate_rule_example(const GenParams& params, const Vocabulary& vocab = Vocabulary::standard());

/// Picks a display entity for a new example.
std::string sample_entity(Rng& rng, const Vocabulary& vocab);

}  // namespace deduce
