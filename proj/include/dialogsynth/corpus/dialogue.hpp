#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/types.hpp"

namespace dialogsynth::corpus {

/// Parses one transcript line of the form
///
///     <turn>. <topic>; <micro_intent>; <role>: <utterance>
///
/// Topic, intent and role may not contain ';' and the role may not contain
/// ':'. Trailing whitespace of the utterance is dropped. Throws ParseError
/// located at the first byte that breaks the grammar.
Utterance parse_dialogue_line(std::string_view line);

/// Inverse of parse_dialogue_line for utterances satisfying the type
/// invariants; throws SerializationError otherwise.
std::string format_dialogue_line(const Utterance& u);

/// One formatted line per utterance, each terminated by '\n'.
std::string serialize_utterances(std::span<const Utterance> utterances);
std::string serialize_dialogue(const Dialogue& d);

/// A transcript line that failed to parse, with its 1-based position in the block.
struct LineError {
  std::size_t line_number = 0;
  std::string line;
  std::string message;
  std::size_t offset = 0;
};

struct TranscriptParse {
  std::vector<Utterance> utterances;
  std::vector<LineError> line_errors;
  /// Dialogue-level problems such as non-increasing turn numbers.
  std::vector<std::string> structure_errors;

  bool ok() const { return line_errors.empty() && structure_errors.empty() && !utterances.empty(); }
};

/// Parses a newline-delimited transcript block. Blank lines are skipped and
/// surrounding whitespace of each line is ignored.
TranscriptParse parse_transcript(std::string_view block);

/// Dialogue-level invariant problems (empty, turns not strictly increasing
/// from 1, reserved tags). Empty result means valid.
std::vector<std::string> dialogue_problems(std::span<const Utterance> utterances);

nlohmann::json to_json(const Dialogue& d);
/// Throws IngestError naming the offending field.
Dialogue dialogue_from_json(const nlohmann::json& j);
Dialogue parse_dialogue_record(std::string_view line);

}  // namespace dialogsynth::corpus
