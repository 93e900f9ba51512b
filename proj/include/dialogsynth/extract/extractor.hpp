#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/extract/concept_set.hpp"
#include "dialogsynth/extract/lexicon.hpp"

namespace dialogsynth::extract {

/// Lexicon concepts in free text. The text is normalized first; surfaces are
/// the normalized lexicon terms.
ConceptSet extract_text_concepts(std::string_view text, const Lexicon& lex, const std::string& source);

/// Structured values verbatim (chief complaint, medications, allergies, vital
/// values, intervention descriptions) plus lexicon hits in the history and
/// narrative.
ConceptSet extract_concepts(const corpus::PatientCareRecord& record, const Lexicon& lex);

/// Lexicon hits per utterance; each concept's source is "turn N".
ConceptSet extract_concepts(const corpus::Dialogue& dialogue, const Lexicon& lex);

struct GcsExtraction {
  std::optional<int> score;
  /// Set when a GCS mention was found but its value was outside [3, 15].
  std::optional<std::string> warning;
};

/// First "GCS", "GCS:" or "GCS of" mention followed by an integer, searching
/// the narrative before the other text fields.
GcsExtraction extract_gcs_detailed(const corpus::PatientCareRecord& record);

/// As extract_gcs_detailed, logging the warning if any.
std::optional<int> extract_gcs(const corpus::PatientCareRecord& record);

enum class Branch { conscious, comatose };

std::string_view to_string(Branch b);

/// GCS <= 8 is comatose; higher or unknown is conscious.
Branch select_branch(std::optional<int> gcs);

}  // namespace dialogsynth::extract
