#include "dialogsynth/concepts/checker.hpp"

#include <algorithm>
#include <tuple>

#include "dialogsynth/kernels/cosine.hpp"
#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::concepts {

using nlohmann::json;

void MatchConfig::validate() const {
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
    throw ConfigError("similarity_threshold must be in (0, 1], got " + std::to_string(similarity_threshold));
  }
}

std::string_view to_string(MatchStage stage) { return stage == MatchStage::syntactic ? "syntactic" : "semantic"; }

namespace {

kernels::Matrix to_matrix(const std::vector<Vector>& vectors, std::size_t begin, std::size_t end, std::size_t dim) {
  kernels::Matrix m(end - begin, dim);
  for (std::size_t i = begin; i < end; ++i) std::copy(vectors[i].begin(), vectors[i].end(), m.data.begin() + (i - begin) * dim);
  return m;
}

}  // namespace

ConceptReport match_concepts(const extract::ConceptSet& src, const extract::ConceptSet& tgt, Embedder* embedder,
                             const MatchConfig& cfg) {
  cfg.validate();
  ConceptReport report;
  const auto& s = src.items();
  const auto& t = tgt.items();
  std::vector<bool> src_used(s.size(), false), tgt_used(t.size(), false);

  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (tgt_used[j] || s[i].surface != t[j].surface) continue;
      report.matched.push_back({s[i], t[j], MatchStage::syntactic, 1.0});
      src_used[i] = tgt_used[j] = true;
      break;
    }
  }

  std::vector<std::size_t> rest_src, rest_tgt;
  for (std::size_t i = 0; i < s.size(); ++i) if (!src_used[i]) rest_src.push_back(i);
  for (std::size_t j = 0; j < t.size(); ++j) if (!tgt_used[j]) rest_tgt.push_back(j);

  if (embedder && !rest_src.empty() && !rest_tgt.empty()) {
    std::vector<std::string> texts;
    for (auto i : rest_src) texts.push_back(s[i].surface);
    for (auto j : rest_tgt) texts.push_back(t[j].surface);
    std::vector<Vector> vectors;
    try {
      vectors = embedder->embed(texts);
    } catch (const ContractError&) {
      throw;
    } catch (const std::exception& e) {
      throw CheckerError(std::string("embedding failed: ") + e.what());
    }
    if (vectors.size() != texts.size()) {
      throw ContractError("embedder returned " + std::to_string(vectors.size()) + " vectors for " +
                          std::to_string(texts.size()) + " texts");
    }
    const std::size_t dim = vectors.front().size();
    if (dim == 0) throw ContractError("embedder returned empty vectors");
    for (const auto& v : vectors) {
      if (v.size() != dim) {
        throw ContractError("embedder returned vectors of dimension " + std::to_string(dim) + " and " +
                            std::to_string(v.size()));
      }
    }
    kernels::Matrix a = to_matrix(vectors, 0, rest_src.size(), dim);
    kernels::Matrix b = to_matrix(vectors, rest_src.size(), vectors.size(), dim);
    kernels::normalize_rows(a);
    kernels::normalize_rows(b);
    const kernels::Matrix sim = kernels::cosine_matrix(a, b);

    struct Candidate {
      double similarity;
      std::size_t a, b;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < rest_src.size(); ++i) {
      for (std::size_t j = 0; j < rest_tgt.size(); ++j) {
        if (sim.at(i, j) >= cfg.similarity_threshold) candidates.push_back({sim.at(i, j), i, j});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
      if (x.similarity != y.similarity) return x.similarity > y.similarity;
      return std::tie(s[rest_src[x.a]].surface, t[rest_tgt[x.b]].surface) <
             std::tie(s[rest_src[y.a]].surface, t[rest_tgt[y.b]].surface);
    });
    for (const auto& c : candidates) {
      const std::size_t i = rest_src[c.a], j = rest_tgt[c.b];
      if (src_used[i] || tgt_used[j]) continue;
      report.matched.push_back({s[i], t[j], MatchStage::semantic, c.similarity});
      src_used[i] = tgt_used[j] = true;
    }
  }

  for (std::size_t i = 0; i < s.size(); ++i) if (!src_used[i]) report.missing.insert(s[i]);
  for (std::size_t j = 0; j < t.size(); ++j) if (!tgt_used[j]) report.hallucinated.insert(t[j]);
  return report;
}

PrecisionRecall factuality_pr(std::size_t matched, std::size_t hallucinated, std::size_t missing) {
  PrecisionRecall pr;
  if (matched + hallucinated > 0) pr.precision = static_cast<double>(matched) / static_cast<double>(matched + hallucinated);
  if (matched + missing > 0) pr.recall = static_cast<double>(matched) / static_cast<double>(matched + missing);
  return pr;
}

PrecisionRecall factuality_pr(const ConceptReport& report) {
  return factuality_pr(report.matched.size(), report.hallucinated.size(), report.missing.size());
}

std::string render_feedback(const ConceptReport& report) {
  if (report.passed()) {
    return "Concept check passed: every record concept is covered and no unsupported concept was added.\n";
  }
  std::string out = "Concept check failed.\n";
  auto section = [&](const char* title, const extract::ConceptSet& set) {
    if (set.empty()) return;
    out += title;
    out += '\n';
    auto surfaces = set.surfaces();
    for (std::size_t i = 0; i < surfaces.size(); ++i) out += "  " + std::to_string(i + 1) + ". " + surfaces[i] + "\n";
  };
  section("Missing concepts (in the record, absent from your output; include each one):", report.missing);
  section("Hallucinated concepts (in your output, not supported by the record; remove them):", report.hallucinated);
  return out;
}

json to_json(const ConceptReport& report) {
  json matched = json::array();
  for (const auto& m : report.matched) {
    matched.push_back({{"src", m.src.surface}, {"tgt", m.tgt.surface}, {"stage", to_string(m.stage)},
                       {"similarity", m.similarity}});
  }
  const auto pr = factuality_pr(report);
  return {{"matched", std::move(matched)},
          {"missing", report.missing.surfaces()},
          {"hallucinated", report.hallucinated.surfaces()},
          {"precision", pr.precision},
          {"recall", pr.recall}};
}

}  // namespace dialogsynth::concepts
