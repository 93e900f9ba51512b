#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/corpus/types.hpp"
#include "dialogsynth/kernels/self_bleu.hpp"

namespace dialogsynth::intrinsic {

/// Lowercased whitespace tokens of all utterance texts, in order.
std::vector<std::string> dialogue_tokens(const corpus::Dialogue& d);

/// Mean per-dialogue BLEU against the rest of the corpus, times 100.
/// Throws PreconditionError for fewer than two dialogues.
double self_bleu(std::span<const corpus::Dialogue> corpus, const kernels::BleuConfig& cfg = {});

/// Mean reciprocal rank. Throws PreconditionError when empty or a rank is < 1.
double mrr(std::span<const int> ranks);

/// 100 * share of true values. Throws PreconditionError when empty.
double yes_rate(std::span<const bool> verdicts);

/// Ranks with ties sharing their average rank (1-based).
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman correlation: Pearson correlation of average ranks. Throws
/// PreconditionError for empty or unequal inputs and UndefinedMetricError
/// when either side has no variance.
double spearman(std::span<const double> x, std::span<const double> y);

/// items x raters nominal labels; nullopt marks a missing rating.
struct RatingsMatrix {
  std::vector<std::vector<std::optional<std::string>>> cells;

  std::size_t items() const { return cells.size(); }
  std::size_t raters() const { return cells.empty() ? 0 : cells.front().size(); }
};

/// Nominal Krippendorff's alpha from the coincidence matrix. Only items with
/// at least two ratings are pairable. Throws PreconditionError for fewer than
/// two raters, ragged rows, or no pairable item; UndefinedMetricError when
/// all pairable ratings share one value.
double krippendorff_alpha(const RatingsMatrix& m);

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::size_t tokens = 0;
  std::size_t vocabulary = 0;
  double utterances_per_dialogue = 0.0;
  double tokens_per_utterance = 0.0;

  nlohmann::json to_json() const;
};

CorpusStats corpus_stats(std::span<const corpus::Dialogue> corpus);

}  // namespace dialogsynth::intrinsic
