#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dialogsynth::text {

/// Unicode NFC normalization of UTF-8 text. Invalid UTF-8 is passed through.
std::string nfc(std::string_view s);

/// Full Unicode lowercase of UTF-8 text.
std::string lower(std::string_view s);

std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);

/// Identifier normalization for topics, roles and intents: NFC, then trimmed.
/// Comparison stays case-sensitive.
std::string normalize_label(std::string_view s);

/// Lexicon-term normalization: NFC, lowercase, whitespace runs collapsed to a
/// single space, trimmed.
std::string normalize_term(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);

/// Tag strings that may never appear inside utterance text.
inline constexpr std::string_view kReservedTags[] = {"<dialogue>", "<plan>", "<approved>", "<critique>"};

/// True if `s` contains any reserved tag, opening or closing form.
bool contains_reserved_tag(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace dialogsynth::text
