#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dialogsynth/corpus/types.hpp"

namespace dialogsynth::extract {

struct LexiconEntry {
  std::string term;  ///< normalized
  std::optional<std::string> canonical_id;
  std::set<std::string> tags;
  /// Record-derived terms skip the semantic-tag filter.
  bool bypass_tag_filter = false;
};

/// One occurrence of a lexicon term in normalized text.
struct TermMatch {
  std::size_t begin = 0;  ///< byte offsets into the normalized text
  std::size_t end = 0;
  std::size_t entry = 0;  ///< index into Lexicon::entries()
};

/// Dictionary of clinical terms with a semantic-type allowlist.
class Lexicon {
 public:
  /// Throws ConfigError when `allowed_tags` is empty.
  explicit Lexicon(std::set<std::string> allowed_tags);

  /// Parses `term<TAB>canonical_id<TAB>tag[,tag...]` lines; '#' starts a comment line.
  static Lexicon parse(std::string_view tsv, std::set<std::string> allowed_tags);
  static Lexicon load(const std::filesystem::path& lexicon, const std::filesystem::path& allowed_tags);
  /// One tag per line, '#' comments.
  static std::set<std::string> parse_tag_list(std::string_view text);
  /// The bundled starter lexicon and allowlist.
  static const Lexicon& ems_default();

  /// Adds or merges an entry. The same term with a different canonical id is a ConfigError.
  void add(std::string_view term, std::optional<std::string> canonical_id, std::set<std::string> tags,
           bool bypass_tag_filter = false);

  /// Copy extended with the record's structured values as terms, so that a
  /// dialogue mentioning them verbatim yields the same surfaces.
  Lexicon with_record_terms(const corpus::PatientCareRecord& record) const;

  const LexiconEntry* find(std::string_view term) const;
  bool is_allowed(const LexiconEntry& entry) const;
  const std::set<std::string>& allowed_tags() const noexcept { return allowed_tags_; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Allowed matches in already-normalized text: longest span first, then
  /// leftmost, non-overlapping, on word boundaries. Sorted by position.
  std::vector<TermMatch> match(std::string_view normalized_text) const;

 private:
  struct Node {
    std::vector<std::pair<unsigned char, std::size_t>> next;
    std::optional<std::size_t> entry;
  };
  std::size_t child(std::size_t node, unsigned char c) const;

  std::set<std::string> allowed_tags_;
  std::vector<LexiconEntry> entries_;
  std::vector<Node> trie_{Node{}};
};

}  // namespace dialogsynth::extract
