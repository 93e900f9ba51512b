#include "dialogsynth/concepts/embedder.hpp"

#include <cmath>
#include <map>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::concepts {

std::vector<Vector> IdentityEmbedder::embed(const std::vector<std::string>& texts) {
  std::map<std::string, std::size_t> slots;
  for (const auto& t : texts) slots.emplace(t, slots.size());
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Vector v(slots.size(), 0.0);
    v[slots.at(t)] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dimension, std::size_t n) : dimension_(dimension), n_(n) {
  if (dimension_ == 0 || n_ == 0) throw PreconditionError("HashedNgramEmbedder needs positive dimension and n");
}

std::vector<Vector> HashedNgramEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const std::string padded = "\x02" + text::normalize_term(t) + "\x03";
    Vector v(dimension_, 0.0);
    if (padded.size() <= n_) {
      v[text::fnv1a64(padded) % dimension_] += 1.0;
    } else {
      for (std::size_t i = 0; i + n_ <= padded.size(); ++i) {
        v[text::fnv1a64(std::string_view(padded).substr(i, n_)) % dimension_] += 1.0;
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace dialogsynth::concepts
