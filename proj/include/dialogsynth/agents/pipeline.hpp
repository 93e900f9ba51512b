#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/agents/prompts.hpp"
#include "dialogsynth/agents/style.hpp"
#include "dialogsynth/concepts/checker.hpp"
#include "dialogsynth/corpus/ontology.hpp"
#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/extract/extractor.hpp"
#include "dialogsynth/flow/checker.hpp"
#include "dialogsynth/llm/gateway.hpp"

namespace dialogsynth::agents {

struct LoopConfig {
  int max_plan_iterations = 8;
  int max_generate_iterations = 8;
  int max_refine_iterations = 5;

  /// Throws ConfigError unless every cap is >= 1.
  void validate() const;
};

/// Shared, read-only services for the agent loops. `chat` is required;
/// `embedder` may be null (exact concept matching only).
struct AgentDeps {
  llm::ChatClient* chat = nullptr;
  concepts::Embedder* embedder = nullptr;
  const corpus::TopicOntology* ontology = nullptr;
  const extract::Lexicon* lexicon = nullptr;
  const PromptLibrary* prompts = nullptr;
  std::string rules;
  std::string exemplars;
  LoopConfig loop;
  concepts::MatchConfig match;
  flow::FlowOptions flow_options;
  flow::BranchRule branch_rule;
  llm::Decoding decoding;
  llm::Decoding style_decoding{0.0, 2048};
  std::string model_id;

  /// Throws ConfigError when a required service is missing.
  void validate() const;
};

enum class StageStatus { accepted, exhausted };

std::string_view to_string(StageStatus status);

struct StageTrace {
  std::string stage;
  StageStatus status = StageStatus::exhausted;
  int iterations = 0;
  /// One entry per iteration with the checker outcomes.
  std::vector<nlohmann::json> reports;
  /// Refine only: whether the style checker approved the returned dialogue.
  std::optional<bool> style_approved;

  nlohmann::json to_json() const;
};

/// Per-record grounding computed once before the loops.
struct RecordContext {
  const corpus::PatientCareRecord* record = nullptr;
  extract::ConceptSet concepts;
  /// Lexicon extended with the record's structured values.
  extract::Lexicon lexicon;
  std::optional<int> gcs;
  extract::Branch branch = extract::Branch::conscious;
  std::string epcr_text;
};

RecordContext make_context(const corpus::PatientCareRecord& record, const AgentDeps& deps);

struct PlanResult {
  std::optional<corpus::DialoguePlan> plan;  ///< set iff accepted
  StageTrace trace;
};

struct DialogueResult {
  std::optional<corpus::Dialogue> dialogue;
  StageTrace trace;
};

/// Planner loop. Throws ParseError when the `<plan>` block stays unparseable
/// after one format reminder.
PlanResult plan(const RecordContext& ctx, const AgentDeps& deps);

/// Generator loop; unparseable lines are fed back as violations.
DialogueResult generate(const RecordContext& ctx, const corpus::DialoguePlan& plan, const AgentDeps& deps);

/// Style critic call. Throws ParseError after one format reminder.
StyleReport style_check(const RecordContext& ctx, const corpus::Dialogue& dialogue, const AgentDeps& deps);

/// Refiner loop. Always returns a dialogue: the first candidate passing all
/// three checks, otherwise the last concept/flow-clean one (or the input).
DialogueResult refine(const RecordContext& ctx, const corpus::Dialogue& dialogue, const AgentDeps& deps);

/// Deterministic checks of a dialogue against its record.
struct DialogueCheck {
  concepts::ConceptReport concept_report;
  flow::FlowReport flow_report;
  flow::FlowReport branch_report;
  std::vector<std::string> structure_problems;

  bool passed() const;
  std::string feedback() const;
  nlohmann::json to_json() const;
};

DialogueCheck check_dialogue(const RecordContext& ctx, std::span<const corpus::Utterance> utterances,
                             const AgentDeps& deps);

struct PipelineTrace {
  std::string record_id;
  std::string status;  ///< "accepted", "exhausted" or "error"
  std::optional<int> gcs;
  extract::Branch branch = extract::Branch::conscious;
  std::vector<StageTrace> stages;
  std::optional<std::string> error;
  /// Set when the error was a backend failure (retries exhausted or unreachable).
  bool backend_failure = false;

  int iterations(std::string_view stage) const;
  nlohmann::json to_json() const;
};

struct PipelineResult {
  std::size_t index = 0;  ///< position in the input
  std::optional<corpus::Dialogue> dialogue;
  PipelineTrace trace;

  bool rejected() const { return !dialogue.has_value(); }
};

/// extract -> branch -> plan -> generate -> refine for one record. Never
/// throws for per-record failures; they become a rejected result.
PipelineResult run_record(const corpus::PatientCareRecord& record, const AgentDeps& deps);

struct PipelineOptions {
  std::size_t workers = 1;
  std::stop_token stop;
  /// Called from worker threads as each record finishes.
  std::function<void(const PipelineResult&)> on_result;
};

/// Records in parallel, each sequential. Results of started records are
/// returned in input order.
std::vector<PipelineResult> run_pipeline(std::span<const corpus::PatientCareRecord> records, const AgentDeps& deps,
                                         const PipelineOptions& options = {});

}  // namespace dialogsynth::agents
