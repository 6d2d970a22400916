#include "deduce/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace deduce {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

Vocabulary build_standard() {
  Vocabulary v;
  // Fictional nouns: onset + rime. Covers every invented word in the
  // published examples (wumpus, sterpus, grimpus, lorpus, ...).
  const char* onsets[] = {"",  "b", "br", "d", "f", "g", "gr", "h", "j", "k", "l", "m",
                          "n", "p", "r",  "s", "sh", "st", "t", "v", "w", "y", "z"};
  const char* rimes[] = {"umpus", "orpus", "impus", "empus", "ompus", "erpus"};
  for (const char* rime : rimes)
    for (const char* onset : onsets) v.add_noun(std::string(onset) + rime);

  for (const char* adj : {"blue",    "red",     "brown",     "orange",      "dull",   "opaque",     "bright",
                          "mean",    "kind",    "shy",       "happy",       "sad",    "large",      "small",
                          "hot",     "cold",    "fruity",    "floral",      "sour",   "sweet",      "spicy",
                          "bitter",  "wooden",  "metallic",  "liquid",      "luminous", "transparent", "earthy",
                          "feisty",  "nervous", "angry",     "aggressive",  "amenable", "slow",     "fast",
                          "soft",    "hard",    "loud",      "quiet",       "striped"})
    v.add_adjective(adj);

  // Words of the hand-written fixtures; never sampled by generators.
  for (const char* noun : {"cat", "dog", "mammal", "carnivore", "vertebrate", "animal", "herbivore"})
    v.add_noun(noun, false);
  for (const char* adj : {"cold-blooded", "warm-blooded", "feline", "graceful", "herbivorous"})
    v.add_adjective(adj, false);

  for (const char* name : {"Alex", "Polly", "Sally", "Fae", "Max", "Rex", "Sam", "Stella", "Wren", "Jay"})
    v.add_entity(name);
  return v;
}

}  // namespace

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary vocab = build_standard();
  return vocab;
}

void Vocabulary::check_fresh(const std::string& word) const {
  if (word.empty()) throw std::invalid_argument("empty vocabulary word");
  if (pos_.count(word) || plural_to_noun_.count(word))
    throw std::invalid_argument("duplicate vocabulary word: " + word);
}

void Vocabulary::add_noun(std::string singular, bool sampleable) {
  singular = lower(singular);
  check_fresh(singular);
  std::string pl = pluralize(singular);
  if (pos_.count(pl) || plural_to_noun_.count(pl)) throw std::invalid_argument("plural collides: " + pl);
  pos_.emplace(singular, PartOfSpeech::Noun);
  plural_to_noun_.emplace(pl, singular);
  noun_to_plural_.emplace(singular, pl);
  if (sampleable) sampleable_.push_back(singular);
}

void Vocabulary::add_adjective(std::string word, bool sampleable) {
  word = lower(word);
  check_fresh(word);
  pos_.emplace(word, PartOfSpeech::Adjective);
  if (sampleable) sampleable_.push_back(word);
}

void Vocabulary::add_entity(std::string display_name) {
  std::string symbol = lower(display_name);
  if (has_entity(symbol)) throw std::invalid_argument("duplicate entity: " + display_name);
  entities_.push_back(symbol);
}

std::optional<PartOfSpeech> Vocabulary::part_of_speech(std::string_view predicate) const {
  auto it = pos_.find(predicate);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::plural(std::string_view noun) const {
  auto it = noun_to_plural_.find(noun);
  return it == noun_to_plural_.end() ? pluralize(noun) : it->second;
}

std::optional<std::string> Vocabulary::noun_from_plural(std::string_view plural) const {
  auto it = plural_to_noun_.find(plural);
  if (it == plural_to_noun_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::has_entity(std::string_view symbol) const {
  return std::find(entities_.begin(), entities_.end(), symbol) != entities_.end();
}

std::optional<std::string> Vocabulary::entity_from_name(std::string_view name) const {
  std::string symbol = lower(name);
  if (!has_entity(symbol)) return std::nullopt;
  return symbol;
}

std::string Vocabulary::display_name(std::string_view entity) const {
  std::string out(entity);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string Vocabulary::pluralize(std::string_view noun) {
  std::string s(noun);
  auto ends = [&](std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return s + "es";
  if (s.size() >= 2 && s.back() == 'y' && !is_vowel(s[s.size() - 2])) return s.substr(0, s.size() - 1) + "ies";
  return s + "s";
}

std::string_view Vocabulary::article(std::string_view noun) {
  return !noun.empty() && is_vowel(static_cast<char>(std::tolower(static_cast<unsigned char>(noun[0])))) ? "an" : "a";
}

PredicatePool::PredicatePool(Rng& rng, const Vocabulary& vocab, const std::set<std::string>& used) {
  for (const auto& p : vocab.generator_predicates())
    if (!used.count(p)) order_.push_back(p);
  rng.shuffle(order_);
}

std::string PredicatePool::fresh() {
  if (next_ == order_.size()) throw VocabularyExhausted("no fresh predicates left");
  return order_[next_++];
}

}  // namespace deduce
