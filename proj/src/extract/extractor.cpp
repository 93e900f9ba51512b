#include "dialogsynth/extract/extractor.hpp"

#include <regex>

#include <spdlog/spdlog.h>

#include "dialogsynth/util/text.hpp"

namespace dialogsynth::extract {

ConceptSet extract_text_concepts(std::string_view text, const Lexicon& lex, const std::string& source) {
  ConceptSet out;
  const std::string normalized = text::normalize_term(text);
  for (const auto& m : lex.match(normalized)) {
    const LexiconEntry& e = lex.entries()[m.entry];
    out.insert(corpus::Concept{e.term, e.canonical_id, e.tags, source});
  }
  return out;
}

ConceptSet extract_concepts(const corpus::PatientCareRecord& record, const Lexicon& lex) {
  ConceptSet out;
  auto structured = [&](const std::string& value, const std::string& source) {
    std::string surface = text::normalize_term(value);
    if (surface.empty()) return;
    corpus::Concept c{surface, std::nullopt, {}, source};
    if (const LexiconEntry* e = lex.find(surface)) {
      c.canonical_id = e->canonical_id;
      c.semantic_tags = e->tags;
    }
    out.insert(std::move(c));
  };
  structured(record.chief_complaint, "chief_complaint");
  for (const auto& m : record.current_medications) structured(m, "current_medications");
  for (const auto& a : record.allergies) structured(a, "allergies");
  for (const auto& v : record.vitals) structured(v.value, "vitals");
  for (const auto& iv : record.interventions) structured(iv.description, "interventions");
  out.merge(extract_text_concepts(record.medical_history, lex, "medical_history"));
  out.merge(extract_text_concepts(record.narrative, lex, "narrative"));
  return out;
}

ConceptSet extract_concepts(const corpus::Dialogue& dialogue, const Lexicon& lex) {
  ConceptSet out;
  for (const auto& u : dialogue.utterances) {
    out.merge(extract_text_concepts(u.text, lex, "turn " + std::to_string(u.turn)));
  }
  return out;
}

GcsExtraction extract_gcs_detailed(const corpus::PatientCareRecord& record) {
  static const std::regex pattern(R"(\bGCS\b\s*(?::|of\b)?\s*(\d+))", std::regex::icase);
  std::vector<const std::string*> fields = {&record.narrative, &record.medical_history, &record.chief_complaint};
  for (const auto& v : record.vitals) fields.push_back(&v.value);
  for (const auto& iv : record.interventions) fields.push_back(&iv.description);
  for (const std::string* field : fields) {
    std::smatch m;
    if (!std::regex_search(*field, m, pattern)) continue;
    const std::string digits = m[1].str();
    const int value = digits.size() > 3 ? 999 : std::stoi(digits);
    if (value < 3 || value > 15) {
      return {std::nullopt, "GCS value " + digits + " is outside [3, 15]; ignored"};
    }
    return {value, std::nullopt};
  }
  return {};
}

std::optional<int> extract_gcs(const corpus::PatientCareRecord& record) {
  auto result = extract_gcs_detailed(record);
  if (result.warning) spdlog::warn("record {}: {}", record.record_id, *result.warning);
  return result.score;
}

std::string_view to_string(Branch b) { return b == Branch::comatose ? "comatose" : "conscious"; }

Branch select_branch(std::optional<int> gcs) {
  return gcs && *gcs <= 8 ? Branch::comatose : Branch::conscious;
}

}  // namespace dialogsynth::extract
