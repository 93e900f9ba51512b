#include <gtest/gtest.h>

#include "dialogsynth/extract/extractor.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"
#include "fixtures.hpp"

namespace ds = dialogsynth;
namespace ex = dialogsynth::extract;

namespace {

ex::Lexicon small_lexicon() {
  return ex::Lexicon::parse(
      "# comment\n"
      "chest pain\tC1\tT184\n"
      "pain\tC2\tT184\n"
      "chest\tC3\tT023\n"
      "pain in chest\tC1\tT184\n"
      "aspirin\tC4\tT121\n",
      {"T184", "T121"});
}

}  // namespace

TEST(Lexicon, LongestMatchWins) {
  const auto lex = small_lexicon();
  const auto matches = lex.match("severe chest pain and pain");
  ASSERT_EQ(matches.size(), 2u);
  EXPECT_EQ(lex.entries()[matches[0].entry].term, "chest pain");
  EXPECT_EQ(lex.entries()[matches[1].entry].term, "pain");
}

TEST(Lexicon, RespectsWordBoundaries) {
  const auto lex = small_lexicon();
  EXPECT_TRUE(lex.match("painful aspirinx").empty());
  EXPECT_EQ(lex.match("pain.").size(), 1u);
}

TEST(Lexicon, DisallowedTagsNeverMatch) {
  const auto lex = small_lexicon();
  for (const auto& m : lex.match("chest chest chest")) {
    ADD_FAILURE() << "unexpected " << lex.entries()[m.entry].term;
  }
}

TEST(Lexicon, ConfigErrorsCarryLineNumbers) {
  try {
    ex::Lexicon::parse("a\tC1\tT1\nb only\n", {"T1"});
    FAIL();
  } catch (const ds::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ex::Lexicon({}), ds::ConfigError);
  ex::Lexicon lex({"T1"});
  lex.add("x", "C1", {"T1"});
  EXPECT_THROW(lex.add("x", "C2", {"T1"}), ds::ConfigError);
}

TEST(Lexicon, MatchesAreSortedAndDisjoint) {
  const auto& lex = ex::Lexicon::ems_default();
  const std::string t = ds::text::normalize_term(
      "Patient with chest pain, shortness of breath and nausea; given aspirin and oxygen via nasal cannula.");
  const auto matches = lex.match(t);
  for (std::size_t i = 1; i < matches.size(); ++i) EXPECT_LE(matches[i - 1].end, matches[i].begin);
  EXPECT_GE(matches.size(), 5u);
}

TEST(Extractor, RecordConceptsIncludeStructuredValues) {
  const auto rec = fixtures::record();
  const auto cs = ex::extract_concepts(rec, ex::Lexicon::ems_default());
  for (const char* s : {"chest pain", "aspirin", "penicillin", "112", "nitroglycerin", "hypertension", "nausea"}) {
    EXPECT_TRUE(cs.contains_surface(s)) << s;
  }
  EXPECT_EQ(cs.size(), 7u);
}

TEST(Extractor, DialogueConceptsUseTurnSources) {
  ds::corpus::Dialogue d{"d", "r", {{1, "A", "b", "R", "I have chest pain"}, {2, "A", "b", "R", "and nausea"}}, {"X"}};
  const auto cs = ex::extract_concepts(d, ex::Lexicon::ems_default());
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs.items()[1].source, "turn 2");
}

TEST(ConceptSet, DeduplicatesBySurfaceAndId) {
  ex::ConceptSet cs;
  EXPECT_TRUE(cs.insert({"dyspnea", "EMS:dyspnea", {}, ""}));
  EXPECT_FALSE(cs.insert({"shortness of breath", "EMS:dyspnea", {}, ""}));
  EXPECT_FALSE(cs.insert({"dyspnea", std::nullopt, {}, ""}));
  EXPECT_THROW(cs.insert({"", std::nullopt, {}, ""}), ds::PreconditionError);
}

TEST(Gcs, ExtractsFirstMentionAndValidatesRange) {
  auto rec = fixtures::record();
  EXPECT_EQ(ex::extract_gcs(rec), std::optional<int>(15));
  EXPECT_EQ(ex::select_branch(15), ex::Branch::conscious);
  rec.narrative = "Unresponsive, gcs of 6 on arrival, later GCS: 9";
  EXPECT_EQ(ex::extract_gcs(rec), std::optional<int>(6));
  EXPECT_EQ(ex::select_branch(6), ex::Branch::comatose);
  EXPECT_EQ(ex::select_branch(8), ex::Branch::comatose);
  EXPECT_EQ(ex::select_branch(9), ex::Branch::conscious);
  rec.narrative = "GCS 22";
  const auto detailed = ex::extract_gcs_detailed(rec);
  EXPECT_FALSE(detailed.score);
  EXPECT_TRUE(detailed.warning);
  rec.narrative = "no score";
  EXPECT_FALSE(ex::extract_gcs(rec));
  EXPECT_EQ(ex::select_branch(std::nullopt), ex::Branch::conscious);
}
