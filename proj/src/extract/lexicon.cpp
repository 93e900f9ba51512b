#include "dialogsynth/extract/lexicon.hpp"

#include <algorithm>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/io.hpp"
#include "dialogsynth/util/resources.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::extract {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.emplace_back(text::trim(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

Lexicon::Lexicon(std::set<std::string> allowed_tags) : allowed_tags_(std::move(allowed_tags)) {
  if (allowed_tags_.empty()) throw ConfigError("lexicon needs at least one allowed semantic tag");
}

std::set<std::string> Lexicon::parse_tag_list(std::string_view text) {
  std::set<std::string> tags;
  for (const auto& line : text::split_lines(text)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    tags.emplace(t);
  }
  return tags;
}

Lexicon Lexicon::parse(std::string_view tsv, std::set<std::string> allowed_tags) {
  Lexicon lex(std::move(allowed_tags));
  std::size_t number = 0;
  for (const auto& raw : text::split_lines(tsv)) {
    ++number;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    const std::string where = "lexicon line " + std::to_string(number);
    if (fields.size() != 3) throw ConfigError(where + ": expected term, canonical id and tags separated by tabs");
    if (fields[1].empty()) throw ConfigError(where + ": empty canonical id");
    std::set<std::string> tags;
    std::size_t start = 0;
    const std::string& tag_field = fields[2];
    while (start <= tag_field.size()) {
      std::size_t comma = tag_field.find(',', start);
      auto tag = text::trim(std::string_view(tag_field).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                 : comma - start));
      if (!tag.empty()) tags.emplace(tag);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (tags.empty()) throw ConfigError(where + ": no semantic tags");
    try {
      lex.add(fields[0], fields[1], std::move(tags));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& lexicon, const std::filesystem::path& allowed_tags) {
  return parse(io::read_file(lexicon), parse_tag_list(io::read_file(allowed_tags)));
}

const Lexicon& Lexicon::ems_default() {
  static const Lexicon instance = parse(resources::get("lexicon/ems_starter.tsv"),
                                        parse_tag_list(resources::get("lexicon/allowed_tags.txt")));
  return instance;
}

std::size_t Lexicon::child(std::size_t node, unsigned char c) const {
  for (const auto& [byte, index] : trie_[node].next) {
    if (byte == c) return index;
  }
  return 0;
}

void Lexicon::add(std::string_view term, std::optional<std::string> canonical_id, std::set<std::string> tags,
                  bool bypass_tag_filter) {
  std::string normalized = text::normalize_term(term);
  if (normalized.empty()) throw ConfigError("lexicon term must not be empty");
  std::size_t node = 0;
  for (unsigned char c : normalized) {
    std::size_t next = child(node, c);
    if (next == 0) {
      next = trie_.size();
      trie_[node].next.emplace_back(c, next);
      trie_.emplace_back();
    }
    node = next;
  }
  if (auto existing = trie_[node].entry) {
    LexiconEntry& e = entries_[*existing];
    if (canonical_id && e.canonical_id && *canonical_id != *e.canonical_id) {
      throw ConfigError("term '" + normalized + "' maps to both " + *e.canonical_id + " and " + *canonical_id);
    }
    if (!e.canonical_id) e.canonical_id = std::move(canonical_id);
    e.tags.insert(tags.begin(), tags.end());
    e.bypass_tag_filter = e.bypass_tag_filter || bypass_tag_filter;
    return;
  }
  trie_[node].entry = entries_.size();
  entries_.push_back({std::move(normalized), std::move(canonical_id), std::move(tags), bypass_tag_filter});
}

Lexicon Lexicon::with_record_terms(const corpus::PatientCareRecord& record) const {
  Lexicon copy = *this;
  auto add_value = [&](const std::string& value) {
    if (!text::normalize_term(value).empty()) copy.add(value, std::nullopt, {}, true);
  };
  add_value(record.chief_complaint);
  for (const auto& m : record.current_medications) add_value(m);
  for (const auto& a : record.allergies) add_value(a);
  for (const auto& v : record.vitals) add_value(v.value);
  for (const auto& iv : record.interventions) add_value(iv.description);
  return copy;
}

const LexiconEntry* Lexicon::find(std::string_view term) const {
  const std::string normalized = text::normalize_term(term);
  std::size_t node = 0;
  for (unsigned char c : normalized) {
    node = child(node, c);
    if (node == 0) return nullptr;
  }
  if (normalized.empty() || !trie_[node].entry) return nullptr;
  return &entries_[*trie_[node].entry];
}

bool Lexicon::is_allowed(const LexiconEntry& entry) const {
  if (entry.bypass_tag_filter) return true;
  return std::any_of(entry.tags.begin(), entry.tags.end(), [&](const auto& t) { return allowed_tags_.count(t) > 0; });
}

std::vector<TermMatch> Lexicon::match(std::string_view s) const {
  std::vector<TermMatch> candidates;
  const auto* bytes = reinterpret_cast<const unsigned char*>(s.data());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_word_byte(bytes[i]) && i > 0 && is_word_byte(bytes[i - 1])) continue;
    std::size_t node = 0;
    for (std::size_t j = i; j < s.size(); ++j) {
      node = child(node, bytes[j]);
      if (node == 0) break;
      const auto& entry = trie_[node].entry;
      if (!entry) continue;
      const bool ends_word = is_word_byte(bytes[j]);
      if (ends_word && j + 1 < s.size() && is_word_byte(bytes[j + 1])) continue;
      if (!is_allowed(entries_[*entry])) continue;
      candidates.push_back({i, j + 1, *entry});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const TermMatch& a, const TermMatch& b) {
    const std::size_t la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<TermMatch> chosen;
  for (const auto& c : candidates) {
    bool overlaps = std::any_of(chosen.begin(), chosen.end(),
                                [&](const TermMatch& k) { return c.begin < k.end && k.begin < c.end; });
    if (!overlaps) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), [](const TermMatch& a, const TermMatch& b) { return a.begin < b.begin; });
  return chosen;
}

}  // namespace dialogsynth::extract
