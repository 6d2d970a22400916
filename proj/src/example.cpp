#include "deduce/example.hpp"

namespace deduce {

std::string_view to_string(Ordering ordering) {
  return ordering == Ordering::Random ? "random" : "postorder";
}

std::optional<Ordering> ordering_from_string(std::string_view name) {
  if (name == "random") return Ordering::Random;
  if (name == "postorder") return Ordering::Postorder;
  return std::nullopt;
}

std::string_view to_string(ExampleKind kind) {
  return kind == ExampleKind::Rule ? "rule" : "compositional";
}

bool operator==(const Example& a, const Example& b) {
  return a.id == b.id && a.kind == b.kind && a.params.rule == b.params.rule && a.params.depth == b.params.depth &&
         a.params.width == b.params.width && a.params.seed == b.params.seed &&
         a.params.distractors == b.params.distractors && a.params.ordering == b.params.ordering &&
         a.min_depth == b.min_depth && a.num_rule_types == b.num_rule_types && a.theory == b.theory &&
         a.query == b.query && a.gold_proof == b.gold_proof && a.distractors == b.distractors &&
         a.question == b.question && a.query_text == b.query_text && a.chain_of_thought == b.chain_of_thought;
}

}  // namespace deduce
