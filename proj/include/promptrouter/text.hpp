#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace promptrouter::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

/// Lowercase, trim, collapse internal whitespace runs to a single space.
/// Category labels are join keys, so every label goes through this.
std::string normalize_label(std::string_view s);

/// Lowercased word tokens. Separators are ASCII non-alphanumerics except the
/// apostrophe inside a word; bytes >= 0x80 are kept as word characters so
/// non-Latin words survive as opaque tokens.
std::vector<std::string> words(std::string_view s);

/// Whitespace-separated tokens, original casing and punctuation preserved.
std::vector<std::string> whitespace_split(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_stopword(std::string_view lowered_word);

/// `words(s)` minus stopwords.
std::vector<std::string> content_words(std::string_view s);

/// Longest prefix of `s` of at most `max_bytes` bytes that does not split a
/// UTF-8 sequence.
std::string_view truncate_utf8(std::string_view s, std::size_t max_bytes);

bool starts_with_word(std::string_view haystack_lower, std::string_view word);

}  // namespace promptrouter::text
