#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace dialogsynth::concepts {

using Vector = std::vector<double>;

/// Maps each input text to a vector; vectors from one call share a dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
};

/// One-hot vector per distinct text within a call, so distinct texts are
/// orthogonal and identical texts have cosine 1.
class IdentityEmbedder final : public Embedder {
 public:
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;
};

/// Deterministic bag of hashed character n-grams (with boundary markers),
/// L2-normalized. Strings sharing most n-grams land close together.
class HashedNgramEmbedder final : public Embedder {
 public:
  explicit HashedNgramEmbedder(std::size_t dimension = 512, std::size_t n = 3);
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dimension_;
  std::size_t n_;
};

/// Adapts any callable, e.g. a remote embedding client.
class FunctionEmbedder final : public Embedder {
 public:
  using Fn = std::function<std::vector<Vector>(const std::vector<std::string>&)>;
  explicit FunctionEmbedder(Fn fn) : fn_(std::move(fn)) {}
  std::vector<Vector> embed(const std::vector<std::string>& texts) override { return fn_(texts); }

 private:
  Fn fn_;
};

}  // namespace dialogsynth::concepts
