#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dialogsynth/concepts/embedder.hpp"
#include "dialogsynth/extract/concept_set.hpp"

namespace dialogsynth::concepts {

struct MatchConfig {
  double similarity_threshold = 0.8;

  /// Throws ConfigError unless the threshold is in (0, 1].
  void validate() const;
};

enum class MatchStage { syntactic, semantic };

std::string_view to_string(MatchStage stage);

struct ConceptMatch {
  corpus::Concept src;
  corpus::Concept tgt;
  MatchStage stage = MatchStage::syntactic;
  double similarity = 1.0;
};

struct ConceptReport {
  std::vector<ConceptMatch> matched;
  extract::ConceptSet missing;       ///< false negatives
  extract::ConceptSet hallucinated;  ///< false positives

  bool passed() const { return missing.empty() && hallucinated.empty(); }
};

/// Aligns source and target concepts. Exact surface matches pair first; the
/// rest are embedded in one batch and paired greedily by descending cosine
/// (ties by source then target surface) while similarity >= threshold.
/// `embedder` may be null, which disables the semantic stage.
///
/// Throws CheckerError when the embedder fails and ContractError when it
/// returns the wrong number of vectors or mixed dimensions.
ConceptReport match_concepts(const extract::ConceptSet& src, const extract::ConceptSet& tgt, Embedder* embedder,
                             const MatchConfig& cfg = {});

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

/// Empty denominators count as 1.0.
PrecisionRecall factuality_pr(const ConceptReport& report);
PrecisionRecall factuality_pr(std::size_t matched, std::size_t hallucinated, std::size_t missing);

/// Enumerated missing then hallucinated surfaces, each sorted.
std::string render_feedback(const ConceptReport& report);

nlohmann::json to_json(const ConceptReport& report);

}  // namespace dialogsynth::concepts
