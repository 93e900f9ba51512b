#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialogsynth::corpus {

/// Directed topic graph with per-topic micro-intent inventories.
///
/// Topic ids are compared case-sensitively after NFC normalization and
/// trimming. A topic may declare aliases (e.g. "HPI"); every query accepts
/// either form.
class TopicOntology {
 public:
  /// Config document:
  ///   {"name": ..., "topics": [{"id": ..., "micro_intents": [...], "aliases": [...]}],
  ///    "edges": {"<from>": ["<to>", ...]}}
  /// Throws ConfigError on any invariant violation.
  static TopicOntology from_json(const nlohmann::json& config);

  /// The bundled EMS topic flow.
  static const TopicOntology& ems_default();

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& topics() const noexcept { return topics_; }

  std::optional<std::string> resolve(std::string_view topic) const;
  bool contains(std::string_view topic) const { return resolve(topic).has_value(); }

  /// False when either topic is undeclared.
  bool allows(std::string_view from, std::string_view to) const;
  const std::vector<std::string>& next_topics(std::string_view topic) const;
  const std::vector<std::string>& micro_intents(std::string_view topic) const;
  bool has_micro_intent(std::string_view topic, std::string_view intent) const;
  std::size_t edge_count() const;

  /// Prompt rendering: one line per topic with its intents and successors.
  std::string render() const;

  nlohmann::json to_json() const;

 private:
  std::string name_;
  std::vector<std::string> topics_;
  std::map<std::string, std::string, std::less<>> alias_to_id_;
  std::map<std::string, std::vector<std::string>, std::less<>> adjacency_;
  std::map<std::string, std::vector<std::string>, std::less<>> intents_;
  std::map<std::string, std::vector<std::string>, std::less<>> aliases_;
};

/// Parses an ontology config document (JSON text).
TopicOntology load_topic_ontology(std::string_view config);

}  // namespace dialogsynth::corpus
