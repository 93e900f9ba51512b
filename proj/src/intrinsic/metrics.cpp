#include "dialogsynth/intrinsic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::intrinsic {

std::vector<std::string> dialogue_tokens(const corpus::Dialogue& d) {
  std::vector<std::string> out;
  for (const auto& u : d.utterances) {
    for (auto& t : text::split_whitespace(text::lower(u.text))) out.push_back(std::move(t));
  }
  return out;
}

double self_bleu(std::span<const corpus::Dialogue> corpus, const kernels::BleuConfig& cfg) {
  if (corpus.size() < 2) throw PreconditionError("self-BLEU needs at least two dialogues");
  std::vector<kernels::Tokens> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) docs.push_back(dialogue_tokens(d));
  const auto scores = kernels::self_bleu_scores(docs, cfg);
  return 100.0 * std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

double mrr(std::span<const int> ranks) {
  if (ranks.empty()) throw PreconditionError("MRR needs at least one rank");
  double sum = 0.0;
  for (int r : ranks) {
    if (r < 1) throw PreconditionError("ranks must be >= 1, got " + std::to_string(r));
    sum += 1.0 / r;
  }
  return sum / static_cast<double>(ranks.size());
}

double yes_rate(std::span<const bool> verdicts) {
  if (verdicts.empty()) throw PreconditionError("yes-rate needs at least one verdict");
  const auto yes = std::count(verdicts.begin(), verdicts.end(), true);
  return 100.0 * static_cast<double>(yes) / static_cast<double>(verdicts.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || x.size() != y.size()) throw PreconditionError("spearman needs two non-empty vectors of equal length");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedMetricError("spearman correlation is undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double krippendorff_alpha(const RatingsMatrix& m) {
  if (m.raters() < 2) throw PreconditionError("krippendorff's alpha needs at least two raters");
  std::map<std::string, std::size_t> category;
  for (const auto& row : m.cells) {
    if (row.size() != m.raters()) throw PreconditionError("ratings matrix rows must all have one cell per rater");
    for (const auto& cell : row) {
      if (cell) category.emplace(*cell, 0);
    }
  }
  std::size_t k = 0;
  for (auto& [_, idx] : category) idx = k++;
  std::vector<double> o(k * k, 0.0);
  bool pairable = false;
  for (const auto& row : m.cells) {
    std::vector<std::size_t> values;
    for (const auto& cell : row) {
      if (cell) values.push_back(category.at(*cell));
    }
    if (values.size() < 2) continue;
    pairable = true;
    const double w = 1.0 / static_cast<double>(values.size() - 1);
    for (std::size_t a = 0; a < values.size(); ++a) {
      for (std::size_t b = 0; b < values.size(); ++b) {
        if (a != b) o[values[a] * k + values[b]] += w;
      }
    }
  }
  if (!pairable) throw PreconditionError("krippendorff's alpha needs an item with at least two ratings");
  std::vector<double> nc(k, 0.0);
  double n = 0.0, observed = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      nc[c] += o[c * k + d];
      if (c != d) observed += o[c * k + d];
    }
    n += nc[c];
  }
  double expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      if (c != d) expected += nc[c] * nc[d];
    }
  }
  if (expected == 0.0) throw UndefinedMetricError("krippendorff's alpha is undefined when all ratings are identical");
  return 1.0 - (n - 1.0) * observed / expected;
}

nlohmann::json CorpusStats::to_json() const {
  return {{"dialogues", dialogues},
          {"utterances", utterances},
          {"tokens", tokens},
          {"vocabulary", vocabulary},
          {"utterances_per_dialogue", utterances_per_dialogue},
          {"tokens_per_utterance", tokens_per_utterance}};
}

CorpusStats corpus_stats(std::span<const corpus::Dialogue> corpus) {
  CorpusStats s;
  std::unordered_set<std::string> vocab;
  s.dialogues = corpus.size();
  for (const auto& d : corpus) {
    s.utterances += d.utterances.size();
    for (const auto& u : d.utterances) {
      auto tokens = text::split_whitespace(text::lower(u.text));
      s.tokens += tokens.size();
      for (auto& t : tokens) vocab.insert(std::move(t));
    }
  }
  s.vocabulary = vocab.size();
  if (s.dialogues > 0) s.utterances_per_dialogue = static_cast<double>(s.utterances) / static_cast<double>(s.dialogues);
  if (s.utterances > 0) s.tokens_per_utterance = static_cast<double>(s.tokens) / static_cast<double>(s.utterances);
  return s;
}

}  // namespace dialogsynth::intrinsic
