#include "promptrouter/text.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>

namespace promptrouter::text {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

constexpr std::string_view kStopwords[] = {
    "a",    "an",    "the",  "of",   "in",    "on",    "at",     "to",    "for",  "with", "and",
    "or",   "but",   "is",   "are",  "was",   "were",  "be",     "been",  "by",   "from", "as",
    "it",   "its",   "this", "that", "these", "those", "i",      "me",    "my",   "you",  "your",
    "he",   "she",   "his",  "her",  "we",    "our",   "they",   "their", "them", "some", "very",
    "into", "onto",  "over", "under", "up",   "down",  "out",    "so",    "just", "then", "there",
    // generation framing, not content
    "image", "images", "picture", "pictures", "please",
};

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string normalize_label(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : trim(s)) {
        if (std::isspace(c) != 0) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (is_word_byte(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '\'' && !cur.empty() && i + 1 < s.size() &&
                   is_word_byte(static_cast<unsigned char>(s[i + 1]))) {
            cur.push_back('\'');
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> whitespace_split(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isspace(c) != 0) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(c));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0) out += sep;
        out += parts[i];
    }
    return out;
}

bool is_stopword(std::string_view lowered_word) {
    return std::find(std::begin(kStopwords), std::end(kStopwords), lowered_word) != std::end(kStopwords);
}

std::vector<std::string> content_words(std::string_view s) {
    auto all = words(s);
    std::erase_if(all, [](const std::string& w) { return is_stopword(w); });
    return all;
}

std::string_view truncate_utf8(std::string_view s, std::size_t max_bytes) {
    if (s.size() <= max_bytes) return s;
    std::size_t cut = max_bytes;
    // back off over continuation bytes so we never split a code point
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    return s.substr(0, cut);
}

bool starts_with_word(std::string_view haystack_lower, std::string_view word) {
    if (!haystack_lower.starts_with(word)) return false;
    return haystack_lower.size() == word.size() ||
           !is_word_byte(static_cast<unsigned char>(haystack_lower[word.size()]));
}

}  // namespace promptrouter::text
