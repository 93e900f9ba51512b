#include <gtest/gtest.h>

#include <cmath>

#include "dialogsynth/concepts/checker.hpp"
#include "dialogsynth/kernels/cosine.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/rng.hpp"

namespace ds = dialogsynth;
namespace cc = dialogsynth::concepts;
using ds::extract::ConceptSet;

namespace {

std::vector<std::string> surfaces(const ConceptSet& cs) { return cs.surfaces(); }

}  // namespace

TEST(Checker, ExactStageAlignsIdenticalSurfaces) {
  const auto src = ConceptSet::from_surfaces({"chest pain", "aspirin", "nausea"});
  const auto tgt = ConceptSet::from_surfaces({"aspirin", "chest pain", "fever"});
  const auto r = cc::match_concepts(src, tgt, nullptr, {});
  EXPECT_EQ(r.matched.size(), 2u);
  EXPECT_EQ(surfaces(r.missing), std::vector<std::string>{"nausea"});
  EXPECT_EQ(surfaces(r.hallucinated), std::vector<std::string>{"fever"});
  const auto pr = cc::factuality_pr(r);
  EXPECT_DOUBLE_EQ(pr.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pr.recall, 2.0 / 3.0);
}

TEST(Checker, IdentityEmbedderNeverPairsDistinctSurfaces) {
  cc::IdentityEmbedder id;
  const auto src = ConceptSet::from_surfaces({"a", "b"});
  const auto tgt = ConceptSet::from_surfaces({"c", "b"});
  const auto r = cc::match_concepts(src, tgt, &id, {});
  EXPECT_EQ(r.matched.size(), 1u);
  EXPECT_EQ(r.missing.size(), 1u);
  EXPECT_EQ(r.hallucinated.size(), 1u);
}

TEST(Checker, SemanticStagePairsNearVariants) {
  cc::HashedNgramEmbedder emb;
  const auto src = ConceptSet::from_surfaces({"nitroglycerin", "hypertension"});
  const auto tgt = ConceptSet::from_surfaces({"nitroglycerine", "hypertensions"});
  const auto r = cc::match_concepts(src, tgt, &emb, {});
  ASSERT_EQ(r.matched.size(), 2u);
  for (const auto& m : r.matched) {
    EXPECT_EQ(m.stage, cc::MatchStage::semantic);
    EXPECT_GE(m.similarity, 0.8);
  }
  EXPECT_TRUE(r.passed());
}

TEST(Checker, GreedyPairingIsOneToOne) {
  cc::FunctionEmbedder emb([](const std::vector<std::string>& texts) {
    std::vector<cc::Vector> out;
    for (const auto& t : texts) out.push_back(t.front() == 'x' ? cc::Vector{1, 0} : cc::Vector{1, 0.01});
    return out;
  });
  const auto src = ConceptSet::from_surfaces({"x1", "x2"});
  const auto tgt = ConceptSet::from_surfaces({"y1"});
  const auto r = cc::match_concepts(src, tgt, &emb, {});
  ASSERT_EQ(r.matched.size(), 1u);
  EXPECT_EQ(r.matched[0].src.surface, "x1");
  EXPECT_EQ(r.missing.size(), 1u);
}

TEST(Checker, EmbedderContractViolations) {
  cc::FunctionEmbedder wrong_count([](const std::vector<std::string>&) { return std::vector<cc::Vector>{{1.0}}; });
  cc::FunctionEmbedder throws([](const std::vector<std::string>&) -> std::vector<cc::Vector> {
    throw std::runtime_error("down");
  });
  const auto src = ConceptSet::from_surfaces({"a", "b"});
  const auto tgt = ConceptSet::from_surfaces({"c"});
  EXPECT_THROW(cc::match_concepts(src, tgt, &wrong_count, {}), ds::ContractError);
  EXPECT_THROW(cc::match_concepts(src, tgt, &throws, {}), ds::CheckerError);
  EXPECT_THROW(cc::MatchConfig{1.5}.validate(), ds::ConfigError);
}

TEST(Checker, PartitionPropertyOnRandomSets) {
  ds::Rng rng(11);
  cc::HashedNgramEmbedder emb;
  const std::vector<std::string> vocab = {"chest pain", "chest pains", "aspirin", "asprin", "nausea", "fever",
                                          "syncope", "syncopy", "oxygen", "ekg", "112", "hives"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> a, b;
    for (const auto& v : vocab) {
      if (rng.below(2)) a.push_back(v);
      if (rng.below(2)) b.push_back(v);
    }
    const auto src = ConceptSet::from_surfaces(a);
    const auto tgt = ConceptSet::from_surfaces(b);
    const auto r = cc::match_concepts(src, tgt, &emb, {});
    EXPECT_EQ(r.matched.size() + r.missing.size(), src.size());
    EXPECT_EQ(r.matched.size() + r.hallucinated.size(), tgt.size());
  }
}

TEST(Checker, FeedbackListsSortedMissingAndHallucinated) {
  const auto r = cc::match_concepts(ConceptSet::from_surfaces({"b", "a"}), ConceptSet::from_surfaces({"z"}), nullptr, {});
  const auto fb = cc::render_feedback(r);
  EXPECT_LT(fb.find("1. a"), fb.find("2. b"));
  EXPECT_NE(fb.find("Hallucinated"), std::string::npos);
}

TEST(Checker, EmptyDenominatorsGiveOne) {
  const auto pr = cc::factuality_pr(0, 0, 0);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 1.0);
}

TEST(Embedders, HashedIsUnitNormAndDeterministic) {
  cc::HashedNgramEmbedder emb(64, 3);
  const auto v1 = emb.embed({"chest pain", "Chest  Pain"});
  double n = 0;
  for (double x : v1[0]) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
  EXPECT_EQ(v1[0], v1[1]);
}

TEST(CosineKernel, ParallelMatchesSerialAndOracle) {
  ds::Rng rng(3);
  for (std::size_t rows : {1u, 7u, 40u}) {
    ds::kernels::Matrix a(rows, 16);
    ds::kernels::Matrix b(rows + 3, 16);
    for (auto& x : a.data) x = rng.uniform() - 0.5;
    for (auto& x : b.data) x = rng.uniform() - 0.5;
    for (std::size_t k = 0; k < 16; ++k) a.data[k] = 0.0;
    const auto p = ds::kernels::cosine_matrix(a, b);
    const auto s = ds::kernels::cosine_matrix_serial(a, b);
    EXPECT_EQ(p.data, s.data);
    for (std::size_t i = 0; i < a.rows; ++i) {
      for (std::size_t j = 0; j < b.rows; ++j) {
        double dot = 0, na = 0, nb = 0;
        for (std::size_t k = 0; k < 16; ++k) {
          dot += a.at(i, k) * b.at(j, k);
          na += a.at(i, k) * a.at(i, k);
          nb += b.at(j, k) * b.at(j, k);
        }
        const double expected = na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na * nb);
        EXPECT_NEAR(p.at(i, j), expected, 1e-12);
      }
    }
  }
  ds::kernels::Matrix a(1, 2), b(1, 3);
  EXPECT_THROW(ds::kernels::cosine_matrix(a, b), ds::PreconditionError);
}
