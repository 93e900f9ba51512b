#pragma once

#include <cstdint>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/agents/prompts.hpp"
#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/llm/gateway.hpp"

namespace dialogsynth::intrinsic {

enum class JudgeMetric { logic, ranking, realism, safety, role, groundedness };

std::string_view to_string(JudgeMetric m);
JudgeMetric parse_judge_metric(std::string_view s);

struct JudgeVerdict {
  JudgeMetric metric = JudgeMetric::logic;
  /// Likert 1..5 for logic.
  int score = 0;
  /// For ranking: canonical dialogue numbers (1-based, input order) from best to worst.
  std::vector<int> ranking;
  /// For ranking: the permutation as returned, over presentation positions.
  std::vector<int> presented_ranking;
  /// For ranking: presentation position -> canonical index (0-based).
  std::vector<std::size_t> presentation;
  /// For binary metrics.
  bool yes = false;
  std::string why;
  std::uint64_t seed = 0;
  std::string prompt_hash;
  std::string item_id;

  /// The value field of the judgment log: int, permutation, or "yes"/"no".
  nlohmann::json value() const;
  nlohmann::json to_log() const;
};

struct JudgeSettings {
  const agents::PromptLibrary* prompts = nullptr;
  llm::Decoding decoding{0.0, 1024};
  std::string model_id;
};

/// Extra inputs for utterance-level prompts; only the fields a metric uses
/// need to be set.
struct UtteranceContext {
  std::string epcr_text;
  std::string rubric;
  std::string protocol_text;
  std::string role_exemplar;
  std::string full_dialogue_text;
};

/// Strict parsers. A single surrounding code fence is tolerated; unknown
/// top-level keys are not. Throw ParseError.
JudgeVerdict parse_logic_verdict(std::string_view response);
std::vector<int> parse_ranking(std::string_view response, std::size_t n);
JudgeVerdict parse_utterance_verdict(std::string_view response, JudgeMetric metric, int utt_id);

/// Presentation order for `n` candidates: a seeded Fisher-Yates shuffle.
std::vector<std::size_t> presentation_order(std::size_t n, std::uint64_t seed);

/// Each judge call retries once with the parse error appended, then throws ParseError.
JudgeVerdict judge_conversation(const corpus::Dialogue& d, llm::ChatClient& chat, const JudgeSettings& settings);
JudgeVerdict judge_ranking(std::span<const corpus::Dialogue> dialogues, std::uint64_t seed, llm::ChatClient& chat,
                           const JudgeSettings& settings);
JudgeVerdict judge_utterance(const corpus::Utterance& u, JudgeMetric metric, const UtteranceContext& context,
                             llm::ChatClient& chat, const JudgeSettings& settings);

/// Thread-safe newline-delimited verdict writer.
class JudgmentLog {
 public:
  explicit JudgmentLog(std::ostream& out) : out_(out) {}
  void write(const JudgeVerdict& v);

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

}  // namespace dialogsynth::intrinsic
