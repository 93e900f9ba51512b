#include "dialogsynth/corpus/plan.hpp"

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::corpus {

using nlohmann::json;

DialoguePlan parse_plan(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan is not valid JSON: ") + e.what(), std::string(json_text), e.byte);
  }
  auto fail = [&](const std::string& message) -> ParseError { return ParseError(message, std::string(json_text), 0); };
  if (!doc.is_array()) throw fail("plan must be a JSON array of steps");
  if (doc.empty()) throw fail("plan has no steps");
  DialoguePlan plan;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& s = doc[i];
    const std::string where = "plan step " + std::to_string(i + 1);
    if (!s.is_object()) throw fail(where + " is not an object");
    PlanStep step;
    auto topic = s.find("topic");
    if (topic == s.end() || !topic->is_string() || text::trim(topic->get<std::string>()).empty()) {
      throw fail(where + " needs a non-empty string \"topic\"");
    }
    step.topic = text::normalize_label(topic->get<std::string>());
    auto intent = s.find("micro_intent");
    if (intent != s.end() && !intent->is_null()) {
      if (!intent->is_string()) throw fail(where + ": \"micro_intent\" must be a string");
      step.micro_intent = text::normalize_label(intent->get<std::string>());
    }
    auto evidence = s.find("evidence");
    if (evidence != s.end() && !evidence->is_null()) {
      if (!evidence->is_array()) throw fail(where + ": \"evidence\" must be an array of strings");
      for (const auto& e : *evidence) {
        if (!e.is_string()) throw fail(where + ": evidence entries must be strings");
        if (text::trim(e.get<std::string>()).empty()) continue;
        step.evidence.push_back(e.get<std::string>());
      }
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

json to_json(const DialoguePlan& plan) {
  json arr = json::array();
  for (const auto& s : plan.steps) {
    arr.push_back({{"topic", s.topic}, {"micro_intent", s.micro_intent}, {"evidence", s.evidence}});
  }
  return arr;
}

}  // namespace dialogsynth::corpus
