#include "dialogsynth/corpus/types.hpp"

#include "dialogsynth/util/text.hpp"

namespace dialogsynth::corpus {

std::string_view to_string(VitalKind kind) {
  switch (kind) {
    case VitalKind::pulse: return "pulse";
    case VitalKind::respiration: return "respiration";
    case VitalKind::blood_pressure: return "blood_pressure";
    case VitalKind::glucose: return "glucose";
    case VitalKind::spo2: return "spo2";
    case VitalKind::ekg: return "ekg";
  }
  return "pulse";
}

std::string_view to_string(InterventionKind kind) {
  return kind == InterventionKind::medication ? "medication" : "procedure";
}

std::optional<VitalKind> parse_vital_kind(std::string_view s) {
  for (VitalKind k : {VitalKind::pulse, VitalKind::respiration, VitalKind::blood_pressure, VitalKind::glucose,
                      VitalKind::spo2, VitalKind::ekg}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<InterventionKind> parse_intervention_kind(std::string_view s) {
  if (s == "procedure") return InterventionKind::procedure;
  if (s == "medication") return InterventionKind::medication;
  return std::nullopt;
}

LabelUniverse LabelUniverse::open() { return LabelUniverse{}; }

LabelUniverse LabelUniverse::from_labels(std::vector<std::string> labels) {
  LabelUniverse u;
  u.open_ = false;
  for (auto& l : labels) u.labels_.insert(text::normalize_label(l));
  return u;
}

LabelUniverse LabelUniverse::parse(std::string_view text) {
  std::vector<std::string> labels;
  for (const auto& line : text::split_lines(text)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    labels.emplace_back(t);
  }
  return from_labels(std::move(labels));
}

bool LabelUniverse::contains(std::string_view label) const {
  if (open_) return !text::trim(label).empty();
  return labels_.count(text::normalize_label(label)) > 0;
}

}  // namespace dialogsynth::corpus
