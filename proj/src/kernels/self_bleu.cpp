#include "dialogsynth/kernels/self_bleu.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <unordered_map>

#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::kernels {

namespace {

using Counts = std::unordered_map<std::string, int>;

/// Largest and second-largest count of an n-gram across documents, with the
/// owner of the largest, so "max over all other documents" is O(1).
struct TopTwo {
  int best = 0;
  std::size_t owner = SIZE_MAX;
  int second = 0;
};

std::string gram_key(const Tokens& t, std::size_t start, std::size_t n) {
  std::string key = t[start];
  for (std::size_t k = 1; k < n; ++k) key.append("\x1f").append(t[start + k]);
  return key;
}

std::vector<Counts> count_grams(const Tokens& t, int max_order) {
  std::vector<Counts> out(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= t.size(); ++i) ++out[un - 1][gram_key(t, i, un)];
  }
  return out;
}

struct Index {
  std::vector<std::vector<Counts>> counts;
  std::vector<std::unordered_map<std::string, TopTwo>> top;  // per order
  std::vector<std::size_t> lengths;
};

void validate(std::span<const Tokens> docs, const BleuConfig& cfg) {
  if (docs.size() < 2) throw PreconditionError("self-BLEU needs at least two documents");
  if (cfg.max_order < 1) throw PreconditionError("BLEU max_order must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw PreconditionError("BLEU epsilon must be positive");
}

void build_top(Index& idx, int max_order) {
  idx.top.assign(static_cast<std::size_t>(max_order), {});
  for (std::size_t d = 0; d < idx.counts.size(); ++d) {
    for (std::size_t n = 0; n < idx.counts[d].size(); ++n) {
      for (const auto& [gram, c] : idx.counts[d][n]) {
        TopTwo& t = idx.top[n][gram];
        if (c > t.best) {
          t.second = t.best;
          t.best = c;
          t.owner = d;
        } else if (c > t.second) {
          t.second = c;
        }
      }
    }
  }
}

double score_one(const Index& idx, std::size_t h, const BleuConfig& cfg) {
  const std::size_t c = idx.lengths[h];
  if (c == 0) return 0.0;
  std::size_t ref_len = 0;
  bool have_ref = false;
  for (std::size_t r = 0; r < idx.lengths.size(); ++r) {
    if (r == h) continue;
    const std::size_t len = idx.lengths[r];
    if (!have_ref) {
      ref_len = len;
      have_ref = true;
      continue;
    }
    const auto dist = [&](std::size_t x) { return x > c ? x - c : c - x; };
    if (dist(len) < dist(ref_len) || (dist(len) == dist(ref_len) && len < ref_len)) ref_len = len;
  }
  const int order = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.max_order), c));
  double log_sum = 0.0;
  for (int n = 1; n <= order; ++n) {
    const auto un = static_cast<std::size_t>(n);
    long long clipped = 0;
    for (const auto& [gram, count] : idx.counts[h][un - 1]) {
      const TopTwo& t = idx.top[un - 1].at(gram);
      const int ref_max = t.owner == h ? t.second : t.best;
      clipped += std::min(count, ref_max);
    }
    const double total = static_cast<double>(c - un + 1);
    const double p = clipped > 0 ? static_cast<double>(clipped) / total : cfg.epsilon / total;
    log_sum += std::log(p);
  }
  const double geo = std::exp(log_sum / order);
  const double bp = c > ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(c));
  return bp * geo;
}

}  // namespace

std::vector<double> self_bleu_scores_serial(std::span<const Tokens> docs, const BleuConfig& cfg) {
  validate(docs, cfg);
  Index idx;
  for (const auto& d : docs) {
    idx.counts.push_back(count_grams(d, cfg.max_order));
    idx.lengths.push_back(d.size());
  }
  build_top(idx, cfg.max_order);
  std::vector<double> out(docs.size());
  for (std::size_t h = 0; h < docs.size(); ++h) out[h] = score_one(idx, h, cfg);
  return out;
}

std::vector<double> self_bleu_scores(std::span<const Tokens> docs, const BleuConfig& cfg) {
  validate(docs, cfg);
  const auto n = static_cast<long long>(docs.size());
  Index idx;
  idx.counts.resize(docs.size());
  idx.lengths.resize(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long d = 0; d < n; ++d) {
    idx.counts[static_cast<std::size_t>(d)] = count_grams(docs[static_cast<std::size_t>(d)], cfg.max_order);
    idx.lengths[static_cast<std::size_t>(d)] = docs[static_cast<std::size_t>(d)].size();
  }
  build_top(idx, cfg.max_order);
  std::vector<double> out(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long h = 0; h < n; ++h) out[static_cast<std::size_t>(h)] = score_one(idx, static_cast<std::size_t>(h), cfg);
  return out;
}

}  // namespace dialogsynth::kernels
