#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/record.hpp"

namespace fixtures {

/// A conscious chest-pain record whose concepts are all covered by
/// `good_plan()` and `good_dialogue()`.
inline const char* record_json() {
  return R"({"record_id":"r-001","chief_complaint":"chest pain","medical_history":"hypertension",
"current_medications":["aspirin"],"allergies":["penicillin"],
"vitals":[{"kind":"pulse","value":"112","timestamp":"2024-03-01T10:02"}],
"interventions":[{"kind":"medication","description":"nitroglycerin"}],
"narrative":"Patient alert, GCS 15, reports nausea.","diagnosis_labels":["Chest Pain: Cardiac Suspected"]})";
}

inline dialogsynth::corpus::PatientCareRecord record() { return dialogsynth::corpus::parse_epcr(std::string_view(record_json())); }

inline nlohmann::json plan_steps(bool complete) {
  nlohmann::json steps = nlohmann::json::array({
      {{"topic", "Chief Complaint"}, {"micro_intent", "identify_primary_complaint"}, {"evidence", {"chest pain", "reports nausea"}}},
      {{"topic", "Responsiveness Exam"}, {"micro_intent", "avpu"}, {"evidence", nlohmann::json::array()}},
      {{"topic", "Primary Assessment"}, {"micro_intent", "check_breathing"}, {"evidence", nlohmann::json::array()}},
      {{"topic", "Vital Signs"}, {"micro_intent", "pulse"}, {"evidence", {"112"}}},
      {{"topic", "HPI"}, {"micro_intent", "medications"}, {"evidence", {"hypertension", "aspirin", "penicillin"}}},
      {{"topic", "Interventions"}, {"micro_intent", "administer_medications"},
       {"evidence", complete ? nlohmann::json{"nitroglycerin"} : nlohmann::json::array()}},
      {{"topic", "Exit to Protocol"}, {"micro_intent", "decide_ems_protocol"}, {"evidence", nlohmann::json::array()}},
      {{"topic", "Transport"}, {"micro_intent", "destination_decision"}, {"evidence", nlohmann::json::array()}},
  });
  return steps;
}

inline std::string plan_reply(bool complete) { return "Here is the plan.\n<plan>\n" + plan_steps(complete).dump(1) + "\n</plan>"; }

inline std::vector<std::string> dialogue_lines(bool complete) {
  return {
      "1. Chief Complaint; identify_primary_complaint; Patient: I have chest pain and some nausea.",
      "2. Responsiveness Exam; avpu; EMT: Can you tell me where we are right now?",
      "3. Primary Assessment; check_breathing; EMT: Your airway is clear and you are moving air well.",
      "4. Vital Signs; pulse; EMT: Your heart rate is 112.",
      "5. History of Present Illness (S.A.M.P.L.E.); medications; Patient: I take aspirin for my hypertension and I am "
      "allergic to penicillin.",
      complete ? "6. Interventions; administer_medications; EMT: I am giving you nitroglycerin under the tongue."
               : "6. Interventions; administer_medications; EMT: I am going to give you something under the tongue.",
      "7. Exit to Protocol; decide_ems_protocol; EMT: We will follow the cardiac protocol.",
      "8. Transport; destination_decision; EMT: We are heading to the cardiac center now.",
  };
}

inline std::string dialogue_reply(bool complete) {
  std::string body;
  for (const auto& l : dialogue_lines(complete)) body += l + "\n";
  return "<dialogue>\n" + body + "</dialogue>";
}

inline std::string style_reply(bool approved, int round) {
  if (approved) return "<approved>true</approved>\n<critique>\n</critique>";
  return "<approved>false</approved>\n<critique>\n1. Round " + std::to_string(round) +
         ": the medic tells rather than shows.\n2. Add a confirming question.\n</critique>";
}

/// Scripted replies in call order: plan x2, generate x2, then three refine
/// rounds each followed by a style call, approved on the third.
inline nlohmann::json pipeline_script() {
  return {{"queue",
           {plan_reply(false), plan_reply(true), dialogue_reply(false), dialogue_reply(true), dialogue_reply(true),
            style_reply(false, 1), dialogue_reply(true), style_reply(false, 2), dialogue_reply(true),
            style_reply(true, 3)}}};
}

}  // namespace fixtures
