#include "dialogsynth/extract/concept_set.hpp"

#include <algorithm>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::extract {

ConceptSet::ConceptSet(std::initializer_list<corpus::Concept> concepts) {
  for (const auto& item : concepts) insert(item);
}

ConceptSet ConceptSet::from_surfaces(const std::vector<std::string>& surfaces, const std::string& source) {
  ConceptSet out;
  for (const auto& s : surfaces) out.insert(corpus::Concept{text::normalize_term(s), std::nullopt, {}, source});
  return out;
}

bool ConceptSet::insert(corpus::Concept c) {
  if (c.surface.empty()) throw PreconditionError("concept surface must not be empty");
  for (const auto& existing : items_) {
    if (existing.surface == c.surface) return false;
    if (existing.canonical_id && c.canonical_id && *existing.canonical_id == *c.canonical_id) return false;
  }
  items_.push_back(std::move(c));
  return true;
}

void ConceptSet::merge(const ConceptSet& other) {
  for (const auto& c : other.items_) insert(c);
}

bool ConceptSet::contains_surface(const std::string& normalized_surface) const {
  return std::any_of(items_.begin(), items_.end(), [&](const auto& c) { return c.surface == normalized_surface; });
}

std::vector<std::string> ConceptSet::surfaces() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& c : items_) out.push_back(c.surface);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dialogsynth::extract
