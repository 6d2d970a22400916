#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/rng.hpp"

namespace deduce {

enum class PartOfSpeech { Noun, Adjective };

/// Word inventory shared by the renderer, the parser and the generators.
///
/// Predicate symbols are the lower-case words themselves ("wumpus", "dull");
/// entity symbols are lower-case names ("polly") displayed capitalized.
class Vocabulary {
 public:
  /// Fictional nouns, adjectives, person names and the handful of real nouns
  /// that appear in the fixture texts.
  static const Vocabulary& standard();

  void add_noun(std::string singular, bool sampleable = true);
  void add_adjective(std::string word, bool sampleable = true);
  void add_entity(std::string display_name);

  std::optional<PartOfSpeech> part_of_speech(std::string_view predicate) const;
  bool has_predicate(std::string_view predicate) const { return part_of_speech(predicate).has_value(); }
  std::string plural(std::string_view noun) const;
  std::optional<std::string> noun_from_plural(std::string_view plural) const;

  bool has_entity(std::string_view symbol) const;
  std::optional<std::string> entity_from_name(std::string_view name) const;
  std::string display_name(std::string_view entity) const;

  /// Predicates generators may sample, in a fixed order.
  const std::vector<std::string>& generator_predicates() const { return sampleable_; }
  const std::vector<std::string>& entities() const { return entities_; }

  /// English plural: -es after sibilants, -ies after consonant+y, else -s.
  static std::string pluralize(std::string_view noun);
  /// "a" or "an" by the first letter.
  static std::string_view article(std::string_view noun);

 private:
  void check_fresh(const std::string& word) const;

  std::map<std::string, PartOfSpeech, std::less<>> pos_;
  std::map<std::string, std::string, std::less<>> plural_to_noun_;
  std::map<std::string, std::string, std::less<>> noun_to_plural_;
  std::vector<std::string> sampleable_;
  std::vector<std::string> entities_;
};

/// Raised when an example needs more fresh predicates or names than the
/// vocabulary holds.
class VocabularyExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampling without replacement from the sampleable predicates.
class PredicatePool {
 public:
  PredicatePool(Rng& rng, const Vocabulary& vocab, const std::set<std::string>& used = {});

  /// Next unused predicate; throws VocabularyExhausted.
  std::string fresh();
  std::size_t remaining() const { return order_.size() - next_; }

 private:
  std::vector<std::string> order_;
  std::size_t next_ = 0;
};

}  // namespace deduce
