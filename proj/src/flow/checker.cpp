#include "dialogsynth/flow/checker.hpp"

#include <algorithm>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::flow {

using nlohmann::json;

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::transition_error: return "transition_error";
    case ViolationKind::hallucinated_topic: return "hallucinated_topic";
    case ViolationKind::invalid_micro_intent: return "invalid_micro_intent";
    case ViolationKind::branch_violation: return "branch_violation";
  }
  return "transition_error";
}

FlowReport validate_flow(std::span<const std::string> topics, const corpus::TopicOntology& ont) {
  if (topics.empty()) throw PreconditionError("validate_flow needs a non-empty topic sequence");
  FlowReport report;
  std::vector<bool> known(topics.size());
  for (std::size_t i = 0; i < topics.size(); ++i) {
    known[i] = ont.contains(topics[i]);
    if (!known[i]) {
      report.violations.push_back({i, ViolationKind::hallucinated_topic, std::nullopt, topics[i], std::nullopt});
    }
    if (i > 0 && known[i - 1] && known[i] && !ont.allows(topics[i - 1], topics[i])) {
      report.violations.push_back({i - 1, ViolationKind::transition_error, topics[i - 1], topics[i], std::nullopt});
    }
  }
  return report;
}

FlowReport validate_flow(std::span<const corpus::Utterance> utterances, const corpus::TopicOntology& ont,
                         const FlowOptions& options) {
  const auto topics = topic_sequence(utterances);
  FlowReport report = validate_flow(topics, ont);
  if (!options.strict_micro_intents) return report;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    if (ont.contains(u.topic) && !ont.has_micro_intent(u.topic, u.micro_intent)) {
      report.violations.push_back({i, ViolationKind::invalid_micro_intent, std::nullopt, u.topic, u.micro_intent});
    }
  }
  return report;
}

FlowReport check_branch(std::span<const std::string> topics, extract::Branch branch, const corpus::TopicOntology& ont,
                        const BranchRule& rule) {
  FlowReport report;
  if (branch != extract::Branch::comatose) return report;
  const auto gate = ont.resolve(rule.gate_topic).value_or(text::normalize_label(rule.gate_topic));
  std::vector<std::string> deferred;
  for (const auto& t : rule.deferred_topics) deferred.push_back(ont.resolve(t).value_or(text::normalize_label(t)));
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const auto id = ont.resolve(topics[i]).value_or(text::normalize_label(topics[i]));
    if (id == gate) break;
    if (std::find(deferred.begin(), deferred.end(), id) != deferred.end()) {
      report.violations.push_back({i, ViolationKind::branch_violation, std::nullopt, topics[i], std::nullopt});
    }
  }
  return report;
}

std::vector<std::string> topic_sequence(std::span<const corpus::Utterance> utterances) {
  std::vector<std::string> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(u.topic);
  return out;
}

std::vector<std::string> topic_sequence(const corpus::DialoguePlan& plan) {
  std::vector<std::string> out;
  out.reserve(plan.steps.size());
  for (const auto& s : plan.steps) out.push_back(s.topic);
  return out;
}

std::string render_feedback(const FlowReport& report) {
  if (report.passed()) return "Topic flow check passed: every transition follows the allowed topic flow.\n";
  std::string out = "Topic flow check failed.\n";
  for (std::size_t k = 0; k < report.violations.size(); ++k) {
    const auto& v = report.violations[k];
    out += "  " + std::to_string(k + 1) + ". ";
    const std::string pos = std::to_string(v.index + 1);
    switch (v.kind) {
      case ViolationKind::transition_error:
        out += "Transition error at position " + pos + ": \"" + v.from_topic.value_or("") + "\" cannot be followed by \"" +
               v.to_topic + "\".";
        break;
      case ViolationKind::hallucinated_topic:
        out += "Hallucinated topic at position " + pos + ": \"" + v.to_topic + "\" is not a known topic.";
        break;
      case ViolationKind::invalid_micro_intent:
        out += "Invalid micro-intent at position " + pos + ": \"" + v.micro_intent.value_or("") +
               "\" does not belong to topic \"" + v.to_topic + "\".";
        break;
      case ViolationKind::branch_violation:
        out += "Branch violation at position " + pos + ": \"" + v.to_topic +
               "\" must not occur before Exit to Protocol for an unresponsive patient.";
        break;
    }
    out += '\n';
  }
  return out;
}

json to_json(const FlowReport& report) {
  json arr = json::array();
  for (const auto& v : report.violations) {
    json e = {{"index", v.index}, {"kind", to_string(v.kind)}, {"to_topic", v.to_topic}};
    if (v.from_topic) e["from_topic"] = *v.from_topic;
    if (v.micro_intent) e["micro_intent"] = *v.micro_intent;
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace dialogsynth::flow
