#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace dialogsynth::corpus {

enum class VitalKind { pulse, respiration, blood_pressure, glucose, spo2, ekg };
enum class InterventionKind { procedure, medication };

std::string_view to_string(VitalKind kind);
std::string_view to_string(InterventionKind kind);
std::optional<VitalKind> parse_vital_kind(std::string_view s);
std::optional<InterventionKind> parse_intervention_kind(std::string_view s);

struct VitalReading {
  VitalKind kind = VitalKind::pulse;
  std::string value;
  std::optional<std::string> timestamp;

  bool operator==(const VitalReading&) const = default;
};

struct Intervention {
  InterventionKind kind = InterventionKind::procedure;
  std::string description;
  std::optional<std::string> timestamp;

  bool operator==(const Intervention&) const = default;
};

/// Structured source record of one EMS encounter.
struct PatientCareRecord {
  std::string record_id;
  std::string chief_complaint;
  std::string medical_history;
  std::vector<std::string> current_medications;
  std::vector<std::string> allergies;
  std::vector<VitalReading> vitals;
  std::vector<Intervention> interventions;
  std::string narrative;
  std::vector<std::string> diagnosis_labels;

  bool operator==(const PatientCareRecord&) const = default;
};

struct Utterance {
  int turn = 1;
  std::string topic;
  std::string micro_intent;
  std::string role;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::string source_record_id;
  std::vector<Utterance> utterances;
  std::vector<std::string> labels;

  bool operator==(const Dialogue&) const = default;
};

struct PlanStep {
  std::string topic;
  std::string micro_intent;
  std::vector<std::string> evidence;

  bool operator==(const PlanStep&) const = default;
};

struct DialoguePlan {
  std::vector<PlanStep> steps;

  bool operator==(const DialoguePlan&) const = default;
};

/// A clinical concept found in a record, plan or dialogue.
struct Concept {
  std::string surface;                      ///< normalized (see text::normalize_term)
  std::optional<std::string> canonical_id;  ///< set iff matched through the lexicon
  std::set<std::string> semantic_tags;
  std::string source;  ///< record field name, "plan", or "turn N"

  bool operator==(const Concept&) const = default;
};

/// The configured set of diagnosis label ids. An open universe accepts any
/// non-empty label.
class LabelUniverse {
 public:
  static LabelUniverse open();
  static LabelUniverse from_labels(std::vector<std::string> labels);
  /// One label per line; blank lines and lines starting with '#' are skipped.
  static LabelUniverse parse(std::string_view text);

  bool is_open() const noexcept { return open_; }
  bool contains(std::string_view label) const;
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  bool open_ = true;
  std::unordered_set<std::string> labels_;
};

}  // namespace dialogsynth::corpus
