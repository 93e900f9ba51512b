#include "dialogsynth/agents/pipeline.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/corpus/plan.hpp"
#include "dialogsynth/corpus/record.hpp"
#include "dialogsynth/corpus/tagged_block.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"
#include "dialogsynth/util/worker_pool.hpp"

namespace dialogsynth::agents {

using nlohmann::json;

void LoopConfig::validate() const {
  if (max_plan_iterations < 1 || max_generate_iterations < 1 || max_refine_iterations < 1) {
    throw ConfigError("iteration caps must all be >= 1");
  }
}

void AgentDeps::validate() const {
  if (!chat) throw ConfigError("agents need a chat backend");
  if (!ontology) throw ConfigError("agents need a topic ontology");
  if (!lexicon) throw ConfigError("agents need a lexicon");
  if (!prompts) throw ConfigError("agents need a prompt library");
  loop.validate();
  match.validate();
}

std::string_view to_string(StageStatus status) { return status == StageStatus::accepted ? "accepted" : "exhausted"; }

json StageTrace::to_json() const {
  json j = {{"stage", stage}, {"status", agents::to_string(status)}, {"iterations", iterations}, {"reports", reports}};
  if (style_approved) j["style_approved"] = *style_approved;
  return j;
}

RecordContext make_context(const corpus::PatientCareRecord& record, const AgentDeps& deps) {
  RecordContext ctx{&record, extract::extract_concepts(record, *deps.lexicon), deps.lexicon->with_record_terms(record),
                    extract::extract_gcs(record), extract::Branch::conscious, corpus::render_epcr(record)};
  ctx.branch = extract::select_branch(ctx.gcs);
  return ctx;
}

namespace {

std::string concept_list(const extract::ConceptSet& set) {
  std::vector<std::string> surfaces;
  for (const auto& c : set) surfaces.push_back(c.surface);
  return text::join(surfaces, "; ");
}

std::string enumerate(const std::string& title, const std::vector<std::string>& items) {
  std::string out = title + "\n";
  for (std::size_t i = 0; i < items.size(); ++i) out += "  " + std::to_string(i + 1) + ". " + items[i] + "\n";
  return out;
}

/// Chat call with at most one format reminder. `parse` throws ParseError.
template <typename Parse>
auto call_with_reminder(const AgentDeps& deps, const std::string& system, const std::string& user,
                        std::vector<llm::Message> follow_up, const llm::Decoding& decoding, std::string_view block,
                        json& report, std::string& raw_out, Parse parse) {
  llm::ChatRequest req{system, user, follow_up, decoding, deps.model_id};
  raw_out = deps.chat->chat(req);
  try {
    return parse(raw_out);
  } catch (const ParseError& first) {
    report["format_retry"] = first.what();
    req.follow_up.push_back({"assistant", raw_out});
    req.follow_up.push_back(
        {"user", deps.prompts->render("format_reminder.user", {{"error", first.what()}, {"block", std::string(block)}})});
    raw_out = deps.chat->chat(req);
    return parse(raw_out);
  }
}

std::string_view block_content(std::string_view raw, std::string_view tag) {
  auto block = corpus::find_tagged_block(raw, tag);
  if (!block) {
    throw ParseError("missing <" + std::string(tag) + ">...</" + std::string(tag) + "> block", std::string(raw),
                     raw.find("<" + std::string(tag) + ">") == std::string_view::npos ? 0 : raw.size());
  }
  return block->content;
}

std::vector<llm::Message> revision_turn(const AgentDeps& deps, const std::string& previous, const std::string& violations) {
  return {{"user", deps.prompts->render("revision.user", {{"previous_output", previous}, {"violations", violations}})}};
}

corpus::Dialogue make_dialogue(const RecordContext& ctx, std::vector<corpus::Utterance> utterances) {
  corpus::Dialogue d;
  d.dialogue_id = "dlg-" + ctx.record->record_id;
  d.source_record_id = ctx.record->record_id;
  d.utterances = std::move(utterances);
  d.labels = ctx.record->diagnosis_labels;
  return d;
}

std::string line_error_feedback(const std::vector<corpus::LineError>& errors) {
  std::vector<std::string> items;
  for (const auto& e : errors) {
    items.push_back("Line " + std::to_string(e.line_number) + " does not match \"<turn>. <topic>; <micro_intent>; <role>: "
                    "<utterance>\" (" + e.message + "): " + e.line);
  }
  return enumerate("Format check failed.", items);
}

json line_errors_json(const std::vector<corpus::LineError>& errors) {
  json arr = json::array();
  for (const auto& e : errors) {
    arr.push_back({{"line_number", e.line_number}, {"line", e.line}, {"message", e.message}, {"offset", e.offset}});
  }
  return arr;
}

}  // namespace

bool DialogueCheck::passed() const {
  return concept_report.passed() && flow_report.passed() && branch_report.passed() && structure_problems.empty();
}

std::string DialogueCheck::feedback() const {
  std::string out;
  if (!structure_problems.empty()) out += enumerate("Structure check failed.", structure_problems);
  if (!concept_report.passed()) out += concepts::render_feedback(concept_report);
  if (!flow_report.passed()) out += flow::render_feedback(flow_report);
  if (!branch_report.passed()) out += flow::render_feedback(branch_report);
  return out;
}

json DialogueCheck::to_json() const {
  return {{"passed", passed()},
          {"structure", structure_problems},
          {"concepts", concepts::to_json(concept_report)},
          {"flow", flow::to_json(flow_report)},
          {"branch", flow::to_json(branch_report)}};
}

DialogueCheck check_dialogue(const RecordContext& ctx, std::span<const corpus::Utterance> utterances,
                             const AgentDeps& deps) {
  DialogueCheck check;
  check.structure_problems = corpus::dialogue_problems(utterances);
  extract::ConceptSet found;
  for (const auto& u : utterances) {
    found.merge(extract::extract_text_concepts(u.text, ctx.lexicon, "turn " + std::to_string(u.turn)));
  }
  check.concept_report = concepts::match_concepts(ctx.concepts, found, deps.embedder, deps.match);
  if (!utterances.empty()) {
    check.flow_report = flow::validate_flow(utterances, *deps.ontology, deps.flow_options);
    check.branch_report =
        flow::check_branch(flow::topic_sequence(utterances), ctx.branch, *deps.ontology, deps.branch_rule);
  }
  return check;
}

PlanResult plan(const RecordContext& ctx, const AgentDeps& deps) {
  PlanResult result;
  result.trace.stage = "plan";
  const std::string topic_flow = deps.ontology->render();
  const std::string system = deps.prompts->render("planner.system", {{"topic_flow", topic_flow}});
  const std::string user =
      deps.prompts->render("planner.user", {{"epcr", ctx.epcr_text}, {"concepts", concept_list(ctx.concepts)}});
  std::vector<llm::Message> follow_up;
  for (int it = 1; it <= deps.loop.max_plan_iterations; ++it) {
    result.trace.iterations = it;
    json report = {{"iteration", it}};
    std::string raw;
    corpus::DialoguePlan candidate =
        call_with_reminder(deps, system, user, follow_up, deps.decoding, "<plan>...</plan>", report, raw,
                           [](const std::string& r) { return corpus::parse_plan(block_content(r, "plan")); });

    std::vector<std::string> evidence_problems;
    std::map<std::string, std::size_t> first_step;
    std::string evidence_text;
    std::vector<corpus::Utterance> steps;
    for (std::size_t i = 0; i < candidate.steps.size(); ++i) {
      const auto& step = candidate.steps[i];
      steps.push_back({static_cast<int>(i + 1), step.topic, step.micro_intent.empty() ? "-" : step.micro_intent,
                       "planner", "-"});
      std::set<std::string> seen_in_step;
      for (const auto& ev : step.evidence) {
        const std::string snippet(text::trim(ev));
        if (ctx.epcr_text.find(snippet) == std::string::npos) {
          evidence_problems.push_back("Step " + std::to_string(i + 1) + " evidence is not verbatim ePCR text: \"" +
                                      snippet + "\"");
        }
        if (!seen_in_step.insert(snippet).second) continue;
        auto [pos, inserted] = first_step.emplace(snippet, i);
        if (!inserted) {
          evidence_problems.push_back("Evidence \"" + snippet + "\" is used in step " + std::to_string(pos->second + 1) +
                                      " and again in step " + std::to_string(i + 1));
        }
        evidence_text += snippet;
        evidence_text += '\n';
      }
    }
    DialogueCheck check;
    check.concept_report = concepts::match_concepts(
        ctx.concepts, extract::extract_text_concepts(evidence_text, ctx.lexicon, "plan"), deps.embedder, deps.match);
    check.flow_report = flow::validate_flow(steps, *deps.ontology, deps.flow_options);
    check.branch_report =
        flow::check_branch(flow::topic_sequence(candidate), ctx.branch, *deps.ontology, deps.branch_rule);
    report["evidence"] = evidence_problems;
    report["check"] = check.to_json();
    const bool passed = check.passed() && evidence_problems.empty();
    report["passed"] = passed;
    result.trace.reports.push_back(report);
    if (passed) {
      result.trace.status = StageStatus::accepted;
      result.plan = std::move(candidate);
      return result;
    }
    std::string violations;
    if (!evidence_problems.empty()) violations += enumerate("Evidence check failed.", evidence_problems);
    violations += check.feedback();
    follow_up = revision_turn(deps, raw, violations);
  }
  result.trace.status = StageStatus::exhausted;
  return result;
}

DialogueResult generate(const RecordContext& ctx, const corpus::DialoguePlan& plan, const AgentDeps& deps) {
  DialogueResult result;
  result.trace.stage = "generate";
  const std::string system =
      deps.prompts->render("generator.system", {{"topic_flow", deps.ontology->render()}, {"rules", deps.rules}});
  const std::string user =
      deps.prompts->render("generator.user", {{"epcr", ctx.epcr_text}, {"plan", corpus::to_json(plan).dump(2)}});
  std::vector<llm::Message> follow_up;
  for (int it = 1; it <= deps.loop.max_generate_iterations; ++it) {
    result.trace.iterations = it;
    json report = {{"iteration", it}};
    std::string raw;
    corpus::TranscriptParse parsed =
        call_with_reminder(deps, system, user, follow_up, deps.decoding, "<dialogue>...</dialogue>", report, raw,
                           [](const std::string& r) { return corpus::parse_transcript(block_content(r, "dialogue")); });
    std::string violations;
    bool passed = false;
    if (!parsed.line_errors.empty()) {
      report["line_errors"] = line_errors_json(parsed.line_errors);
      violations = line_error_feedback(parsed.line_errors);
    } else {
      DialogueCheck check = check_dialogue(ctx, parsed.utterances, deps);
      report["check"] = check.to_json();
      passed = check.passed();
      violations = check.feedback();
    }
    report["passed"] = passed;
    result.trace.reports.push_back(report);
    if (passed) {
      result.trace.status = StageStatus::accepted;
      result.dialogue = make_dialogue(ctx, std::move(parsed.utterances));
      return result;
    }
    follow_up = revision_turn(deps, raw, violations);
  }
  result.trace.status = StageStatus::exhausted;
  return result;
}

StyleReport style_check(const RecordContext& ctx, const corpus::Dialogue& dialogue, const AgentDeps& deps) {
  const std::string system = deps.prompts->render("style.system", {{"rules", deps.rules}});
  const std::string user = deps.prompts->render(
      "style.user", {{"topic_flow", deps.ontology->render()},
                     {"epcr", ctx.epcr_text},
                     {"dialogue", corpus::serialize_utterances(dialogue.utterances)}});
  json ignored;
  std::string raw;
  return call_with_reminder(deps, system, user, {}, deps.style_decoding,
                            "<approved>...</approved> and <critique>...</critique>", ignored, raw,
                            [](const std::string& r) { return parse_style_response(r); });
}

DialogueResult refine(const RecordContext& ctx, const corpus::Dialogue& dialogue, const AgentDeps& deps) {
  DialogueResult result;
  result.trace.stage = "refine";
  const std::string system =
      deps.prompts->render("refiner.system", {{"rules", deps.rules}, {"exemplars", deps.exemplars}});
  corpus::Dialogue current = dialogue;
  std::vector<llm::Message> follow_up;
  for (int it = 1; it <= deps.loop.max_refine_iterations; ++it) {
    result.trace.iterations = it;
    json report = {{"iteration", it}};
    const std::string user = deps.prompts->render(
        "refiner.user", {{"topic_flow", deps.ontology->render()},
                         {"epcr", ctx.epcr_text},
                         {"dialogue", corpus::serialize_utterances(current.utterances)}});
    std::string raw;
    corpus::TranscriptParse parsed =
        call_with_reminder(deps, system, user, follow_up, deps.decoding, "<dialogue>...</dialogue>", report, raw,
                           [](const std::string& r) { return corpus::parse_transcript(block_content(r, "dialogue")); });
    std::string violations;
    bool passed = false;
    if (!parsed.line_errors.empty()) {
      report["line_errors"] = line_errors_json(parsed.line_errors);
      violations = line_error_feedback(parsed.line_errors);
    } else {
      DialogueCheck check = check_dialogue(ctx, parsed.utterances, deps);
      report["check"] = check.to_json();
      if (check.passed()) {
        current = make_dialogue(ctx, std::move(parsed.utterances));
        StyleReport style;
        try {
          style = style_check(ctx, current, deps);
        } catch (const ParseError& e) {
          style = {false, {std::string("style checker output could not be parsed: ") + e.what()}};
          report["style_parse_error"] = e.what();
        }
        report["style"] = to_json(style);
        passed = style.approved;
        if (!passed) violations = enumerate("Style check failed.", style.critiques);
      } else {
        violations = check.feedback();
      }
    }
    report["passed"] = passed;
    result.trace.reports.push_back(report);
    if (passed) {
      result.trace.status = StageStatus::accepted;
      result.trace.style_approved = true;
      result.dialogue = std::move(current);
      return result;
    }
    follow_up = revision_turn(deps, raw, violations);
  }
  result.trace.status = StageStatus::exhausted;
  result.trace.style_approved = false;
  result.dialogue = std::move(current);
  return result;
}

int PipelineTrace::iterations(std::string_view stage) const {
  for (const auto& s : stages) {
    if (s.stage == stage) return s.iterations;
  }
  return 0;
}

json PipelineTrace::to_json() const {
  json stages_json = json::array();
  for (const auto& s : stages) stages_json.push_back(s.to_json());
  json j = {{"record_id", record_id},
            {"status", status},
            {"branch", extract::to_string(branch)},
            {"gcs", gcs ? json(*gcs) : json(nullptr)},
            {"stages", std::move(stages_json)}};
  if (error) j["error"] = *error;
  if (backend_failure) j["backend_failure"] = true;
  return j;
}

PipelineResult run_record(const corpus::PatientCareRecord& record, const AgentDeps& deps) {
  PipelineResult result;
  result.trace.record_id = record.record_id;
  try {
    const RecordContext ctx = make_context(record, deps);
    result.trace.gcs = ctx.gcs;
    result.trace.branch = ctx.branch;
    PlanResult planned = plan(ctx, deps);
    result.trace.stages.push_back(planned.trace);
    if (!planned.plan) {
      result.trace.status = "exhausted";
      return result;
    }
    DialogueResult generated = generate(ctx, *planned.plan, deps);
    result.trace.stages.push_back(generated.trace);
    if (!generated.dialogue) {
      result.trace.status = "exhausted";
      return result;
    }
    DialogueResult refined = refine(ctx, *generated.dialogue, deps);
    result.trace.stages.push_back(refined.trace);
    result.dialogue = std::move(refined.dialogue);
    result.trace.status = "accepted";
  } catch (const BackendError& e) {
    result.trace.status = "error";
    result.trace.error = e.what();
    result.trace.backend_failure = true;
  } catch (const std::exception& e) {
    result.trace.status = "error";
    result.trace.error = e.what();
  }
  if (result.trace.status != "accepted") result.dialogue.reset();
  return result;
}

std::vector<PipelineResult> run_pipeline(std::span<const corpus::PatientCareRecord> records, const AgentDeps& deps,
                                         const PipelineOptions& options) {
  deps.validate();
  std::vector<std::optional<PipelineResult>> slots(records.size());
  std::mutex callback_mutex;
  run_indexed(
      records.size(), std::max<std::size_t>(1, options.workers),
      [&](std::size_t i) {
        PipelineResult r = run_record(records[i], deps);
        r.index = i;
        spdlog::info("record {}: {}", r.trace.record_id, r.trace.status);
        if (options.on_result) {
          std::lock_guard lock(callback_mutex);
          options.on_result(r);
        }
        slots[i] = std::move(r);
      },
      options.stop);
  std::vector<PipelineResult> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace dialogsynth::agents
