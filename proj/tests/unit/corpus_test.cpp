#include <gtest/gtest.h>

#include "dialogsynth/corpus/dialogue.hpp"
#include "dialogsynth/corpus/ontology.hpp"
#include "dialogsynth/corpus/plan.hpp"
#include "dialogsynth/corpus/record.hpp"
#include "dialogsynth/corpus/tagged_block.hpp"
#include "dialogsynth/util/errors.hpp"
#include "fixtures.hpp"

namespace ds = dialogsynth;
namespace corpus = dialogsynth::corpus;
using nlohmann::json;

TEST(Record, ParsesEveryField) {
  const auto rec = fixtures::record();
  EXPECT_EQ(rec.record_id, "r-001");
  ASSERT_EQ(rec.vitals.size(), 1u);
  EXPECT_EQ(rec.vitals[0].kind, corpus::VitalKind::pulse);
  EXPECT_EQ(rec.vitals[0].timestamp, std::optional<std::string>("2024-03-01T10:02"));
  EXPECT_EQ(rec.interventions[0].kind, corpus::InterventionKind::medication);
}

TEST(Record, JsonRoundTrip) {
  const auto rec = fixtures::record();
  EXPECT_EQ(corpus::parse_epcr(corpus::to_json(rec)), rec);
}

TEST(Record, ErrorsNameTheField) {
  auto doc = json::parse(fixtures::record_json());
  doc["vitals"][0]["timestamp"] = "2024-13-01";
  try {
    corpus::parse_epcr(doc);
    FAIL();
  } catch (const ds::IngestError& e) {
    EXPECT_EQ(e.field_path(), "vitals[0].timestamp");
  }
  doc = json::parse(fixtures::record_json());
  doc.erase("record_id");
  EXPECT_THROW(corpus::parse_epcr(doc), ds::IngestError);
  doc = json::parse(fixtures::record_json());
  doc["surprise"] = 1;
  EXPECT_THROW(corpus::parse_epcr(doc), ds::IngestError);
  doc = json::parse(fixtures::record_json());
  doc["diagnosis_labels"] = json::array();
  EXPECT_THROW(corpus::parse_epcr(doc), ds::IngestError);
}

TEST(Record, LabelUniverseIsEnforced) {
  const auto universe = corpus::LabelUniverse::from_labels({"Stroke"});
  EXPECT_THROW(corpus::parse_epcr(std::string_view(fixtures::record_json()), universe), ds::LabelUniverseError);
}

TEST(Record, Iso8601Validation) {
  EXPECT_TRUE(corpus::is_iso8601("2024-02-29"));
  EXPECT_FALSE(corpus::is_iso8601("2023-02-29"));
  EXPECT_TRUE(corpus::is_iso8601("2019-04-02T14:05:31.5-05:00"));
  EXPECT_FALSE(corpus::is_iso8601("2019-04-02T24:00"));
  EXPECT_FALSE(corpus::is_iso8601("yesterday"));
}

TEST(Record, RenderingContainsEveryValueVerbatim) {
  const auto rec = fixtures::record();
  const auto rendered = corpus::render_epcr(rec);
  for (const auto& [path, value] : corpus::text_fields(rec)) {
    EXPECT_NE(rendered.find(value), std::string::npos) << path;
  }
}

TEST(DialogueLine, ParsesAllFields) {
  const auto u = corpus::parse_dialogue_line("12. Vital Signs; pulse; EMT: Pulse is 112; regular.");
  EXPECT_EQ(u.turn, 12);
  EXPECT_EQ(u.topic, "Vital Signs");
  EXPECT_EQ(u.micro_intent, "pulse");
  EXPECT_EQ(u.role, "EMT");
  EXPECT_EQ(u.text, "Pulse is 112; regular.");
}

TEST(DialogueLine, ErrorsAreLocated) {
  struct Case {
    const char* line;
    std::size_t offset;
  };
  for (const Case& c : {Case{"x. A; b; R: t", 0}, Case{"01. A; b; R: t", 0}, Case{"1 A; b; R: t", 1},
                        Case{"1.A; b; R: t", 2}, Case{"1. A b R t", 10}, Case{"1. A; b; R:", 11}}) {
    try {
      corpus::parse_dialogue_line(c.line);
      ADD_FAILURE() << c.line;
    } catch (const ds::ParseError& e) {
      EXPECT_EQ(e.offset(), c.offset) << c.line << " -> " << e.what();
    }
  }
}

TEST(DialogueLine, FormatRejectsUnserializableFields) {
  corpus::Utterance u{1, "A;B", "x", "R", "t"};
  EXPECT_THROW(corpus::format_dialogue_line(u), ds::SerializationError);
  u = {1, "A", "x", "R:1", "t"};
  EXPECT_THROW(corpus::format_dialogue_line(u), ds::SerializationError);
  u = {1, "A", "x", "R", "has <plan> tag"};
  EXPECT_THROW(corpus::format_dialogue_line(u), ds::SerializationError);
}

TEST(Transcript, CollectsLineAndStructureErrors) {
  auto parsed = corpus::parse_transcript("1. A; b; R: hi\n\nbad line\n3. A; b; R: ok\n");
  ASSERT_EQ(parsed.line_errors.size(), 1u);
  EXPECT_EQ(parsed.line_errors[0].line_number, 3u);
  parsed = corpus::parse_transcript("2. A; b; R: hi\n1. A; b; R: again\n");
  EXPECT_TRUE(parsed.line_errors.empty());
  EXPECT_EQ(parsed.structure_errors.size(), 2u);
  EXPECT_FALSE(parsed.ok());
}

TEST(DialogueRecord, JsonRoundTrip) {
  corpus::Dialogue d{"d1", "r1", {{1, "A", "b", "R", "hello"}, {2, "A", "c", "S", "there"}}, {"Stroke"}};
  EXPECT_EQ(corpus::dialogue_from_json(corpus::to_json(d)), d);
  EXPECT_EQ(corpus::parse_dialogue_record(corpus::to_json(d).dump()), d);
  auto j = corpus::to_json(d);
  j["utterances"][1]["turn"] = 1;
  EXPECT_THROW(corpus::dialogue_from_json(j), ds::IngestError);
}

TEST(TaggedBlock, FindsFirstBlock) {
  const auto b = corpus::find_tagged_block("pre <plan>abc</plan> <plan>x</plan>", "plan");
  ASSERT_TRUE(b);
  EXPECT_EQ(b->content, "abc");
  EXPECT_EQ(b->open_offset, 4u);
  EXPECT_FALSE(corpus::find_tagged_block("<plan> open only", "plan"));
}

TEST(Plan, ParsesAndRoundTrips) {
  const auto plan = corpus::parse_plan(fixtures::plan_steps(true).dump());
  ASSERT_EQ(plan.steps.size(), 8u);
  EXPECT_EQ(plan.steps[4].evidence.size(), 3u);
  EXPECT_EQ(corpus::parse_plan(corpus::to_json(plan).dump()), plan);
  EXPECT_THROW(corpus::parse_plan("{\"topic\":1}"), ds::ParseError);
  EXPECT_THROW(corpus::parse_plan("[{\"micro_intent\":\"x\"}]"), ds::ParseError);
  EXPECT_THROW(corpus::parse_plan("[{"), ds::ParseError);
}

TEST(Ontology, DefaultShape) {
  const auto& o = corpus::TopicOntology::ems_default();
  EXPECT_EQ(o.topics().size(), 13u);
  EXPECT_TRUE(o.allows("Dispatch", "Introduction"));
  EXPECT_FALSE(o.allows("Dispatch", "Transport"));
  EXPECT_EQ(o.resolve("HPI"), std::optional<std::string>("History of Present Illness (S.A.M.P.L.E.)"));
  EXPECT_TRUE(o.allows("HPI", "Pain Assessment"));
  EXPECT_TRUE(o.has_micro_intent("Vital Signs", "pulse"));
  EXPECT_FALSE(o.contains("Small Talk"));
}

TEST(Ontology, ConfigErrors) {
  EXPECT_THROW(corpus::TopicOntology::from_json(json::array()), ds::ConfigError);
  EXPECT_THROW(corpus::TopicOntology::from_json({{"topics", json::array()}}), ds::ConfigError);
  const json dup = {{"topics", {{{"id", "A"}, {"micro_intents", {"x"}}}, {{"id", "A"}, {"micro_intents", {"y"}}}}}};
  EXPECT_THROW(corpus::TopicOntology::from_json(dup), ds::ConfigError);
  const json bad_edge = {{"topics", {{{"id", "A"}, {"micro_intents", {"x"}}}}}, {"edges", {{"A", {"B"}}}}};
  EXPECT_THROW(corpus::TopicOntology::from_json(bad_edge), ds::ConfigError);
  const json semicolon = {{"topics", {{{"id", "A;B"}, {"micro_intents", {"x"}}}}}};
  EXPECT_THROW(corpus::TopicOntology::from_json(semicolon), ds::ConfigError);
}

TEST(Ontology, JsonRoundTripPreservesGraph) {
  const auto& o = corpus::TopicOntology::ems_default();
  const auto copy = corpus::TopicOntology::from_json(o.to_json());
  EXPECT_EQ(copy.edge_count(), o.edge_count());
  for (const auto& a : o.topics()) {
    for (const auto& b : o.topics()) EXPECT_EQ(copy.allows(a, b), o.allows(a, b));
  }
}
