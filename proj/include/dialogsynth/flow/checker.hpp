#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/ontology.hpp"
#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/extract/extractor.hpp"

namespace dialogsynth::flow {

enum class ViolationKind { transition_error, hallucinated_topic, invalid_micro_intent, branch_violation };

std::string_view to_string(ViolationKind kind);

struct FlowViolation {
  /// Position in the sequence; for a transition error, the position of the source topic.
  std::size_t index = 0;
  ViolationKind kind = ViolationKind::transition_error;
  std::optional<std::string> from_topic;
  std::string to_topic;
  /// Offending intent for invalid_micro_intent.
  std::optional<std::string> micro_intent;

  bool operator==(const FlowViolation&) const = default;
};

struct FlowReport {
  std::vector<FlowViolation> violations;

  bool passed() const { return violations.empty(); }
};

struct FlowOptions {
  /// Also require each utterance's micro_intent to belong to its topic.
  bool strict_micro_intents = false;
};

/// Checks a topic sequence against the ontology graph. Unknown topics are
/// reported once as hallucinated and produce no transition errors.
/// Throws PreconditionError on an empty sequence.
FlowReport validate_flow(std::span<const std::string> topics, const corpus::TopicOntology& ont);

/// As above over utterance topics, optionally checking micro-intents.
FlowReport validate_flow(std::span<const corpus::Utterance> utterances, const corpus::TopicOntology& ont,
                         const FlowOptions& options = {});

/// History-taking topics that the comatose branch defers until after the gate topic.
struct BranchRule {
  std::vector<std::string> deferred_topics = {"History of Present Illness (S.A.M.P.L.E.)",
                                              "Pain Assessment (O.P.Q.R.S.T.)"};
  std::string gate_topic = "Exit to Protocol";
};

/// For the comatose branch, flags any deferred topic that appears before the
/// first gate topic. The conscious branch always passes.
FlowReport check_branch(std::span<const std::string> topics, extract::Branch branch, const corpus::TopicOntology& ont,
                        const BranchRule& rule = {});

std::vector<std::string> topic_sequence(std::span<const corpus::Utterance> utterances);
std::vector<std::string> topic_sequence(const corpus::DialoguePlan& plan);

/// Enumerated violations in discovery order; pass message when empty.
std::string render_feedback(const FlowReport& report);

nlohmann::json to_json(const FlowReport& report);

}  // namespace dialogsynth::flow
