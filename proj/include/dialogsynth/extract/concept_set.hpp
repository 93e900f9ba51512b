#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "dialogsynth/corpus/types.hpp"

namespace dialogsynth::extract {

/// Insertion-ordered set of concepts. Two concepts are duplicates when they
/// share a canonical id, or when they share a normalized surface.
class ConceptSet {
 public:
  ConceptSet() = default;
  ConceptSet(std::initializer_list<corpus::Concept> concepts);

  /// Concepts with only a surface (no canonical id, no tags), normalized.
  static ConceptSet from_surfaces(const std::vector<std::string>& surfaces, const std::string& source = {});

  /// Returns false (and keeps the existing element) on a duplicate. Throws
  /// PreconditionError for an empty surface.
  bool insert(corpus::Concept c);
  void merge(const ConceptSet& other);

  bool contains_surface(const std::string& normalized_surface) const;
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const std::vector<corpus::Concept>& items() const noexcept { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  /// Sorted surfaces.
  std::vector<std::string> surfaces() const;

 private:
  std::vector<corpus::Concept> items_;
};

}  // namespace dialogsynth::extract
