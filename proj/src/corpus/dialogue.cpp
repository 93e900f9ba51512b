#include "dialogsynth/corpus/dialogue.hpp"

#include <cctype>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::corpus {

using nlohmann::json;

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t'; }

class LineCursor {
 public:
  explicit LineCursor(std::string_view line) : line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, std::string(line_), pos_); }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& message) const {
    throw ParseError(message, std::string(line_), offset);
  }

  int turn() {
    const std::size_t start = pos_;
    while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a turn number");
    if (line_[start] == '0') fail_at(start, "turn number must be a positive integer without leading zeros");
    if (pos_ - start > 9) fail_at(start, "turn number is too large");
    return std::stoi(std::string(line_.substr(start, pos_ - start)));
  }

  void expect(char c, const std::string& what) {
    if (pos_ >= line_.size() || line_[pos_] != c) fail("expected " + what);
    ++pos_;
  }

  void whitespace(const std::string& after) {
    if (pos_ >= line_.size() || !is_ws(line_[pos_])) fail("expected whitespace after " + after);
    while (pos_ < line_.size() && is_ws(line_[pos_])) ++pos_;
  }

  /// Field up to (not including) the next `delim`; leaves the cursor on it.
  std::string_view field_until(char delim, const std::string& name) {
    const std::size_t start = pos_;
    const std::size_t end = line_.find(delim, pos_);
    if (end == std::string_view::npos) fail_at(line_.size(), "expected '" + std::string(1, delim) + "' after " + name);
    pos_ = end;
    std::string_view value = text::trim(line_.substr(start, end - start));
    if (value.empty()) fail_at(start, name + " must not be empty");
    return value;
  }

  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return line_.substr(pos_); }

 private:
  std::string_view line_;
  std::size_t pos_ = 0;
};

}  // namespace

Utterance parse_dialogue_line(std::string_view line) {
  LineCursor cur(line);
  Utterance u;
  u.turn = cur.turn();
  cur.expect('.', "'.' after the turn number");
  cur.whitespace("'.'");
  u.topic = text::normalize_label(cur.field_until(';', "topic"));
  cur.expect(';', "';'");
  cur.whitespace("topic separator");
  u.micro_intent = text::normalize_label(cur.field_until(';', "micro_intent"));
  cur.expect(';', "';'");
  cur.whitespace("micro_intent separator");
  const std::size_t role_start = cur.pos();
  std::string_view role = cur.field_until(':', "role");
  if (role.find(';') != std::string_view::npos) {
    cur.fail_at(role_start + std::string_view(line.substr(role_start)).find(';'), "role must not contain ';'");
  }
  u.role = text::normalize_label(role);
  cur.expect(':', "':' after the role");
  cur.whitespace("role");
  const std::size_t text_start = cur.pos();
  std::string_view body = text::trim_right(cur.rest());
  if (body.empty()) cur.fail_at(text_start, "utterance text must not be empty");
  if (text::contains_reserved_tag(body)) cur.fail_at(text_start, "utterance text contains a reserved tag");
  u.text = std::string(body);
  return u;
}

std::string format_dialogue_line(const Utterance& u) {
  if (u.turn < 1) throw SerializationError("turn must be >= 1, got " + std::to_string(u.turn));
  auto check_field = [&](const std::string& value, std::string_view name, bool forbid_colon) {
    if (text::trim(value).empty()) throw SerializationError(std::string(name) + " must not be empty");
    if (value.find(';') != std::string::npos) throw SerializationError(std::string(name) + " must not contain ';'");
    if (forbid_colon && value.find(':') != std::string::npos) {
      throw SerializationError(std::string(name) + " must not contain ':'");
    }
    if (value.find('\n') != std::string::npos) throw SerializationError(std::string(name) + " must be a single line");
  };
  check_field(u.topic, "topic", false);
  check_field(u.micro_intent, "micro_intent", false);
  check_field(u.role, "role", true);
  std::string_view body = text::trim(u.text);
  if (body.empty()) throw SerializationError("utterance text must not be empty");
  if (body.find('\n') != std::string_view::npos) throw SerializationError("utterance text must be a single line");
  if (text::contains_reserved_tag(body)) {
    throw SerializationError("utterance " + std::to_string(u.turn) + " contains a reserved tag");
  }
  std::string out = std::to_string(u.turn);
  out.append(". ").append(text::trim(u.topic)).append("; ").append(text::trim(u.micro_intent)).append("; ");
  out.append(text::trim(u.role)).append(": ").append(body);
  return out;
}

std::string serialize_utterances(std::span<const Utterance> utterances) {
  std::string out;
  for (const auto& u : utterances) {
    out.append(format_dialogue_line(u));
    out.push_back('\n');
  }
  return out;
}

std::string serialize_dialogue(const Dialogue& d) {
  if (auto problems = dialogue_problems(d.utterances); !problems.empty()) {
    throw SerializationError("dialogue '" + d.dialogue_id + "': " + problems.front());
  }
  return serialize_utterances(d.utterances);
}

std::vector<std::string> dialogue_problems(std::span<const Utterance> utterances) {
  std::vector<std::string> out;
  if (utterances.empty()) {
    out.emplace_back("dialogue has no utterances");
    return out;
  }
  if (utterances.front().turn != 1) {
    out.push_back("turn numbering must start at 1 (first turn is " + std::to_string(utterances.front().turn) + ")");
  }
  for (std::size_t i = 1; i < utterances.size(); ++i) {
    if (utterances[i].turn <= utterances[i - 1].turn) {
      out.push_back("turn " + std::to_string(utterances[i].turn) + " does not follow turn " +
                    std::to_string(utterances[i - 1].turn) + " (turns must strictly increase)");
    }
  }
  for (const auto& u : utterances) {
    if (text::contains_reserved_tag(u.text)) {
      out.push_back("utterance " + std::to_string(u.turn) + " contains a reserved tag");
    }
  }
  return out;
}

TranscriptParse parse_transcript(std::string_view block) {
  TranscriptParse result;
  std::size_t number = 0;
  for (const auto& raw : text::split_lines(block)) {
    ++number;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    try {
      result.utterances.push_back(parse_dialogue_line(line));
    } catch (const ParseError& e) {
      result.line_errors.push_back({number, std::string(line), e.what(), e.offset()});
    }
  }
  if (result.line_errors.empty()) result.structure_errors = dialogue_problems(result.utterances);
  return result;
}

json to_json(const Dialogue& d) {
  json utts = json::array();
  for (const auto& u : d.utterances) {
    utts.push_back({{"turn", u.turn}, {"topic", u.topic}, {"micro_intent", u.micro_intent}, {"role", u.role},
                    {"text", u.text}});
  }
  return {{"dialogue_id", d.dialogue_id},
          {"source_record_id", d.source_record_id},
          {"labels", d.labels},
          {"utterances", std::move(utts)}};
}

Dialogue dialogue_from_json(const json& j) {
  if (!j.is_object()) throw IngestError("$", "dialogue must be a JSON object");
  auto str = [&](const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw IngestError(path, "required string field");
    return it->get<std::string>();
  };
  Dialogue d;
  d.dialogue_id = str(j, "dialogue_id", "dialogue_id");
  d.source_record_id = str(j, "source_record_id", "source_record_id");
  if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw IngestError("labels", "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) throw IngestError("labels[" + std::to_string(i) + "]", "expected a string");
      d.labels.push_back(text::normalize_label((*it)[i].get<std::string>()));
    }
  }
  auto utts = j.find("utterances");
  if (utts == j.end() || !utts->is_array()) throw IngestError("utterances", "required array field");
  for (std::size_t i = 0; i < utts->size(); ++i) {
    const std::string path = "utterances[" + std::to_string(i) + "]";
    const json& e = (*utts)[i];
    if (!e.is_object()) throw IngestError(path, "expected an object");
    Utterance u;
    auto turn = e.find("turn");
    if (turn == e.end() || !turn->is_number_integer()) throw IngestError(path + ".turn", "required integer field");
    u.turn = turn->get<int>();
    u.topic = text::normalize_label(str(e, "topic", path + ".topic"));
    u.micro_intent = text::normalize_label(str(e, "micro_intent", path + ".micro_intent"));
    u.role = text::normalize_label(str(e, "role", path + ".role"));
    u.text = str(e, "text", path + ".text");
    if (text::trim(u.text).empty()) throw IngestError(path + ".text", "must not be empty");
    d.utterances.push_back(std::move(u));
  }
  if (auto problems = dialogue_problems(d.utterances); !problems.empty()) {
    throw IngestError("utterances", problems.front());
  }
  return d;
}

Dialogue parse_dialogue_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IngestError("$", std::string("malformed JSON: ") + e.what());
  }
  return dialogue_from_json(j);
}

}  // namespace dialogsynth::corpus
