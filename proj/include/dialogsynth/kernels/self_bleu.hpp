#pragma once

#include <span>
#include <string>
#include <vector>

namespace dialogsynth::kernels {

using Tokens = std::vector<std::string>;

struct BleuConfig {
  int max_order = 4;
  /// Numerator used in place of a zero clipped n-gram count.
  double epsilon = 0.1;
};

/// BLEU in [0, 1] of each document against all the others as references:
/// clipped multi-reference n-gram precisions up to min(max_order, length)
/// with uniform weights, epsilon smoothing, and the brevity penalty against
/// the closest reference length (shorter on ties). Empty hypotheses score 0.
/// Requires at least two documents.
std::vector<double> self_bleu_scores(std::span<const Tokens> docs, const BleuConfig& cfg = {});
std::vector<double> self_bleu_scores_serial(std::span<const Tokens> docs, const BleuConfig& cfg = {});

}  // namespace dialogsynth::kernels
