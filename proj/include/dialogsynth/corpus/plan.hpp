#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/types.hpp"

namespace dialogsynth::corpus {

/// Parses the JSON array carried in a `<plan>` block:
/// [{"topic": ..., "micro_intent": ..., "evidence": [...]}, ...].
/// Throws ParseError on malformed JSON or schema mismatch.
DialoguePlan parse_plan(std::string_view json_text);

nlohmann::json to_json(const DialoguePlan& plan);

}  // namespace dialogsynth::corpus
