#include "dialogsynth/intrinsic/judge.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/rng.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::intrinsic {

using nlohmann::json;

std::string_view to_string(JudgeMetric m) {
  switch (m) {
    case JudgeMetric::logic: return "logic";
    case JudgeMetric::ranking: return "ranking";
    case JudgeMetric::realism: return "realism";
    case JudgeMetric::safety: return "safety";
    case JudgeMetric::role: return "role";
    case JudgeMetric::groundedness: return "groundedness";
  }
  return "logic";
}

JudgeMetric parse_judge_metric(std::string_view s) {
  for (auto m : {JudgeMetric::logic, JudgeMetric::ranking, JudgeMetric::realism, JudgeMetric::safety, JudgeMetric::role,
                 JudgeMetric::groundedness}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown judge metric: " + std::string(s));
}

json JudgeVerdict::value() const {
  switch (metric) {
    case JudgeMetric::logic: return score;
    case JudgeMetric::ranking: return ranking;
    default: return yes ? "yes" : "no";
  }
}

json JudgeVerdict::to_log() const {
  json j = {{"metric", to_string(metric)}, {"value", value()}, {"why", why}, {"seed", seed}, {"prompt_hash", prompt_hash}};
  if (!item_id.empty()) j["item_id"] = item_id;
  if (metric == JudgeMetric::ranking) {
    j["presented_ranking"] = presented_ranking;
    j["presentation"] = presentation;
  }
  return j;
}

namespace {

std::string_view strip_fence(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 6 || s.substr(0, 3) != "```" || s.substr(s.size() - 3) != "```") return s;
  std::string_view inner = s.substr(3, s.size() - 6);
  const std::size_t nl = inner.find('\n');
  if (nl != std::string_view::npos && text::trim(inner.substr(0, nl)).find_first_of(" {[\"") == std::string_view::npos) {
    inner = inner.substr(nl + 1);
  }
  return text::trim(inner);
}

json parse_object(std::string_view response, const std::set<std::string>& allowed_keys) {
  const std::string_view body = strip_fence(response);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("judge output is not valid JSON: ") + e.what(), std::string(response), e.byte);
  }
  if (!doc.is_object()) throw ParseError("judge output must be a JSON object", std::string(response), 0);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed_keys.count(it.key())) {
      throw ParseError("unexpected key \"" + it.key() + "\" in judge output", std::string(response),
                       std::string(response).find("\"" + it.key() + "\""));
    }
  }
  for (const auto& k : allowed_keys) {
    if (!doc.contains(k)) throw ParseError("judge output lacks \"" + k + "\"", std::string(response), response.size());
  }
  return doc;
}

[[noreturn]] void schema_error(const std::string& message, std::string_view response) {
  throw ParseError(message, std::string(response), 0);
}

std::string why_of(const json& obj, std::string_view response) {
  auto w = obj.find("why");
  if (w == obj.end() || !w->is_string()) schema_error("\"why\" must be a string", response);
  return w->get<std::string>();
}

}  // namespace

JudgeVerdict parse_logic_verdict(std::string_view response) {
  const json doc = parse_object(response, {"logic"});
  const json& logic = doc.at("logic");
  if (!logic.is_object()) schema_error("\"logic\" must be an object", response);
  auto score = logic.find("score");
  if (score == logic.end() || !score->is_number_integer()) schema_error("logic.score must be an integer", response);
  const int s = score->get<int>();
  if (s < 1 || s > 5) schema_error("logic.score must be between 1 and 5, got " + std::to_string(s), response);
  JudgeVerdict v;
  v.metric = JudgeMetric::logic;
  v.score = s;
  v.why = why_of(logic, response);
  return v;
}

std::vector<int> parse_ranking(std::string_view response, std::size_t n) {
  const json doc = parse_object(response, {"overall_ranking"});
  const json& arr = doc.at("overall_ranking");
  if (!arr.is_array()) schema_error("overall_ranking must be an array", response);
  std::vector<int> out;
  for (const auto& e : arr) {
    if (!e.is_number_integer()) schema_error("overall_ranking entries must be integers", response);
    out.push_back(e.get<int>());
  }
  std::vector<int> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(n);
  std::iota(expected.begin(), expected.end(), 1);
  if (sorted != expected) schema_error("overall_ranking must be a permutation of 1.." + std::to_string(n), response);
  return out;
}

JudgeVerdict parse_utterance_verdict(std::string_view response, JudgeMetric metric, int utt_id) {
  const std::string key(to_string(metric));
  const json doc = parse_object(response, {"utt_id", key});
  if (!doc.at("utt_id").is_number_integer() || doc.at("utt_id").get<int>() != utt_id) {
    schema_error("utt_id must be " + std::to_string(utt_id), response);
  }
  const json& body = doc.at(key);
  if (!body.is_object()) schema_error("\"" + key + "\" must be an object", response);
  auto yn = body.find("yes_no");
  if (yn == body.end() || !yn->is_string() || (*yn != "yes" && *yn != "no")) {
    schema_error(key + ".yes_no must be \"yes\" or \"no\"", response);
  }
  JudgeVerdict v;
  v.metric = metric;
  v.yes = *yn == "yes";
  v.why = why_of(body, response);
  v.item_id = std::to_string(utt_id);
  return v;
}

std::vector<std::size_t> presentation_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

namespace {

template <typename Parse>
auto ask(llm::ChatClient& chat, const JudgeSettings& settings, const std::string& user, std::string& hash, Parse parse) {
  if (!settings.prompts) throw ConfigError("judge needs a prompt library");
  llm::ChatRequest req{settings.prompts->get("judge.system"), user, {}, settings.decoding, settings.model_id};
  hash = llm::prompt_hash(req.messages());
  std::string raw = chat.chat(req);
  try {
    return parse(raw);
  } catch (const ParseError& e) {
    req.follow_up.push_back({"assistant", raw});
    req.follow_up.push_back({"user", std::string("Your output did not match the schema: ") + e.what() +
                                         "\nReturn JSON only, exactly in the requested schema."});
    raw = chat.chat(req);
    return parse(raw);
  }
}

}  // namespace

JudgeVerdict judge_conversation(const corpus::Dialogue& d, llm::ChatClient& chat, const JudgeSettings& settings) {
  const std::string user =
      settings.prompts->render("judge_logic.user", {{"dialogue_text", corpus::serialize_utterances(d.utterances)}});
  std::string hash;
  JudgeVerdict v = ask(chat, settings, user, hash, [](const std::string& r) { return parse_logic_verdict(r); });
  v.prompt_hash = hash;
  v.item_id = d.dialogue_id;
  return v;
}

JudgeVerdict judge_ranking(std::span<const corpus::Dialogue> dialogues, std::uint64_t seed, llm::ChatClient& chat,
                           const JudgeSettings& settings) {
  if (dialogues.size() < 2) throw PreconditionError("ranking needs at least two dialogues");
  const auto order = presentation_order(dialogues.size(), seed);
  std::string cards;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    cards += "\n\nDialogue " + std::to_string(pos + 1) + ":\n" +
             corpus::serialize_utterances(dialogues[order[pos]].utterances);
  }
  const std::string user = settings.prompts->render("judge_ranking.user", {{"dialogues", cards}});
  std::string hash;
  const std::size_t n = dialogues.size();
  std::vector<int> raw =
      ask(chat, settings, user, hash, [n](const std::string& r) { return parse_ranking(r, n); });
  JudgeVerdict v;
  v.metric = JudgeMetric::ranking;
  v.presented_ranking = raw;
  v.presentation = order;
  for (int r : raw) v.ranking.push_back(static_cast<int>(order[static_cast<std::size_t>(r - 1)]) + 1);
  v.seed = seed;
  v.prompt_hash = hash;
  std::vector<std::string> ids;
  for (const auto& d : dialogues) ids.push_back(d.dialogue_id);
  v.item_id = text::join(ids, ",");
  return v;
}

JudgeVerdict judge_utterance(const corpus::Utterance& u, JudgeMetric metric, const UtteranceContext& context,
                             llm::ChatClient& chat, const JudgeSettings& settings) {
  agents::TemplateValues values = {{"utt_id", std::to_string(u.turn)}, {"role", u.role}, {"text", u.text}};
  std::string name;
  switch (metric) {
    case JudgeMetric::realism:
      name = "judge_realism.user";
      values["rules"] = context.rubric;
      break;
    case JudgeMetric::safety:
      name = "judge_safety.user";
      values["protocol_text"] = context.protocol_text;
      break;
    case JudgeMetric::role:
      name = "judge_role.user";
      values["role_exemplar"] = context.role_exemplar;
      values["full_dialogue_text"] = context.full_dialogue_text;
      break;
    case JudgeMetric::groundedness:
      name = "judge_groundedness.user";
      values["epcr_text"] = context.epcr_text;
      break;
    default:
      throw PreconditionError("judge_utterance handles realism, safety, role and groundedness only");
  }
  std::string hash;
  const int id = u.turn;
  JudgeVerdict v = ask(chat, settings, settings.prompts->render(name, values), hash,
                       [metric, id](const std::string& r) { return parse_utterance_verdict(r, metric, id); });
  v.prompt_hash = hash;
  return v;
}

void JudgmentLog::write(const JudgeVerdict& v) {
  const std::string line = v.to_log().dump();
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  out_.flush();
}

}  // namespace dialogsynth::intrinsic
