#include "dialogsynth/corpus/ontology.hpp"

#include <algorithm>
#include <set>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/resources.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::corpus {

using nlohmann::json;

namespace {

std::string checked_id(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  std::string id = text::normalize_label(v.get<std::string>());
  if (id.empty()) throw ConfigError(where + " must not be empty");
  if (id.find(';') != std::string::npos || id.find('\n') != std::string::npos) {
    throw ConfigError(where + " '" + id + "' must not contain ';' or line breaks");
  }
  return id;
}

const std::vector<std::string>& empty_list() {
  static const std::vector<std::string> empty;
  return empty;
}

}  // namespace

TopicOntology TopicOntology::from_json(const json& config) {
  if (!config.is_object()) throw ConfigError("ontology config must be a JSON object");
  TopicOntology ont;
  if (auto it = config.find("name"); it != config.end() && it->is_string()) ont.name_ = it->get<std::string>();

  auto topics = config.find("topics");
  if (topics == config.end() || !topics->is_array()) throw ConfigError("ontology config needs a \"topics\" array");
  if (topics->empty()) throw ConfigError("ontology declares no topics");

  for (std::size_t i = 0; i < topics->size(); ++i) {
    const json& t = (*topics)[i];
    const std::string where = "topics[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ConfigError(where + " must be an object");
    auto id_it = t.find("id");
    if (id_it == t.end()) throw ConfigError(where + " needs an \"id\"");
    std::string id = checked_id(*id_it, where + ".id");
    if (ont.alias_to_id_.count(id)) throw ConfigError("topic '" + id + "' is declared twice");
    ont.alias_to_id_[id] = id;
    ont.topics_.push_back(id);

    auto intents = t.find("micro_intents");
    if (intents == t.end() || !intents->is_array() || intents->empty()) {
      throw ConfigError("topic '" + id + "' declares no micro_intents");
    }
    std::vector<std::string> list;
    for (std::size_t k = 0; k < intents->size(); ++k) {
      std::string intent = checked_id((*intents)[k], where + ".micro_intents[" + std::to_string(k) + "]");
      if (std::find(list.begin(), list.end(), intent) == list.end()) list.push_back(std::move(intent));
    }
    ont.intents_[id] = std::move(list);
    ont.adjacency_[id];
  }

  for (std::size_t i = 0; i < topics->size(); ++i) {
    const json& t = (*topics)[i];
    auto aliases = t.find("aliases");
    if (aliases == t.end() || aliases->is_null()) continue;
    if (!aliases->is_array()) throw ConfigError("topics[" + std::to_string(i) + "].aliases must be an array");
    const std::string& id = ont.topics_[i];
    for (const auto& a : *aliases) {
      std::string alias = checked_id(a, "alias of '" + id + "'");
      if (ont.alias_to_id_.count(alias)) throw ConfigError("alias '" + alias + "' collides with another topic or alias");
      ont.alias_to_id_[alias] = id;
      ont.aliases_[id].push_back(std::move(alias));
    }
  }

  if (auto edges = config.find("edges"); edges != config.end() && !edges->is_null()) {
    if (!edges->is_object()) throw ConfigError("\"edges\" must map each topic to a list of next topics");
    for (auto it = edges->begin(); it != edges->end(); ++it) {
      auto from = ont.resolve(it.key());
      if (!from) throw ConfigError("edge source '" + it.key() + "' is not a declared topic");
      if (!it.value().is_array()) throw ConfigError("edges of '" + it.key() + "' must be an array");
      auto& targets = ont.adjacency_[*from];
      for (const auto& target : it.value()) {
        std::string raw = checked_id(target, "edge target of '" + it.key() + "'");
        auto to = ont.resolve(raw);
        if (!to) throw ConfigError("edge " + it.key() + " -> " + raw + " targets an undeclared topic");
        if (std::find(targets.begin(), targets.end(), *to) == targets.end()) targets.push_back(*to);
      }
    }
  }
  return ont;
}

const TopicOntology& TopicOntology::ems_default() {
  static const TopicOntology instance = load_topic_ontology(resources::get("ontology/ems_topic_flow.json"));
  return instance;
}

std::optional<std::string> TopicOntology::resolve(std::string_view topic) const {
  const std::string key = text::normalize_label(topic);
  auto it = alias_to_id_.find(key);
  if (it == alias_to_id_.end()) return std::nullopt;
  return it->second;
}

bool TopicOntology::allows(std::string_view from, std::string_view to) const {
  auto f = resolve(from);
  auto t = resolve(to);
  if (!f || !t) return false;
  const auto& next = adjacency_.find(*f)->second;
  return std::find(next.begin(), next.end(), *t) != next.end();
}

const std::vector<std::string>& TopicOntology::next_topics(std::string_view topic) const {
  auto id = resolve(topic);
  if (!id) return empty_list();
  return adjacency_.find(*id)->second;
}

const std::vector<std::string>& TopicOntology::micro_intents(std::string_view topic) const {
  auto id = resolve(topic);
  if (!id) return empty_list();
  return intents_.find(*id)->second;
}

bool TopicOntology::has_micro_intent(std::string_view topic, std::string_view intent) const {
  const auto& list = micro_intents(topic);
  return std::find(list.begin(), list.end(), text::normalize_label(intent)) != list.end();
}

std::size_t TopicOntology::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, next] : adjacency_) n += next.size();
  return n;
}

std::string TopicOntology::render() const {
  std::string out;
  for (std::size_t i = 0; i < topics_.size(); ++i) {
    const std::string& id = topics_[i];
    out += std::to_string(i + 1) + ". " + id;
    if (auto a = aliases_.find(id); a != aliases_.end()) out += " (also: " + text::join(a->second, ", ") + ")";
    out += "\n   micro_intents: " + text::join(intents_.find(id)->second, ", ");
    out += "\n   allowed next topics: " + text::join(adjacency_.find(id)->second, ", ") + "\n";
  }
  return out;
}

json TopicOntology::to_json() const {
  json topics = json::array();
  json edges = json::object();
  for (const auto& id : topics_) {
    json t = {{"id", id}, {"micro_intents", intents_.find(id)->second}};
    if (auto a = aliases_.find(id); a != aliases_.end()) t["aliases"] = a->second;
    topics.push_back(std::move(t));
    edges[id] = adjacency_.find(id)->second;
  }
  return {{"name", name_}, {"topics", std::move(topics)}, {"edges", std::move(edges)}};
}

TopicOntology load_topic_ontology(std::string_view config) {
  json doc;
  try {
    doc = json::parse(config);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("ontology config is not valid JSON: ") + e.what());
  }
  return TopicOntology::from_json(doc);
}

}  // namespace dialogsynth::corpus
