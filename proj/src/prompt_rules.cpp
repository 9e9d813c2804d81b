#include "promptrouter/prompt_rules.hpp"

#include "promptrouter/text.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <set>

namespace promptrouter {

std::string_view to_string(PromptType type) noexcept {
    switch (type) {
        case PromptType::PromptBased: return "PromptBased";
        case PromptType::InstructionBased: return "InstructionBased";
        case PromptType::InspirationBased: return "InspirationBased";
        case PromptType::HypothesisBased: return "HypothesisBased";
    }
    return "PromptBased";
}

std::optional<PromptType> prompt_type_from_string(std::string_view name) noexcept {
    for (auto t : {PromptType::PromptBased, PromptType::InstructionBased, PromptType::InspirationBased,
                   PromptType::HypothesisBased}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

namespace rules {

namespace {

// Classification reads at most this many bytes of the input.
constexpr std::size_t kClassifyWindow = 1000;

struct Token {
    std::string text;  // as typed, trailing clause punctuation removed
    std::string key;   // lowercased, surrounding punctuation removed
    bool ends_clause = false;
};

bool is_punct(unsigned char c) {
    return std::ispunct(c) != 0 && c != '\'';
}

std::string replace_curly_apostrophes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        // U+2019 RIGHT SINGLE QUOTATION MARK
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
            static_cast<unsigned char>(s[i + 1]) == 0x80 && static_cast<unsigned char>(s[i + 2]) == 0x99) {
            out.push_back('\'');
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::vector<Token> tokenize(std::string_view input) {
    std::vector<Token> out;
    for (auto& raw : text::whitespace_split(replace_curly_apostrophes(input))) {
        Token tok;
        std::string_view body = raw;
        while (!body.empty() && is_punct(static_cast<unsigned char>(body.back()))) {
            const char c = body.back();
            if (c == ',' || c == ';') tok.ends_clause = true;
            body.remove_suffix(1);
        }
        std::string_view key = body;
        while (!key.empty() && is_punct(static_cast<unsigned char>(key.front()))) key.remove_prefix(1);
        tok.text = std::string(body);
        tok.key = text::to_lower(key);
        if (tok.text.empty() && tok.key.empty()) {
            // a bare punctuation token such as "," still closes a clause
            if (!out.empty()) out.back().ends_clause = out.back().ends_clause || tok.ends_clause;
            continue;
        }
        out.push_back(std::move(tok));
    }
    return out;
}

bool in(std::string_view key, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), key) != set.end();
}

bool in(std::string_view key, const std::vector<std::string>& set) {
    return std::find(set.begin(), set.end(), key) != set.end();
}

bool matches_at(const std::vector<Token>& toks, std::size_t pos, const std::vector<std::string_view>& seq) {
    if (pos + seq.size() > toks.size()) return false;
    std::size_t i = pos;
    for (auto w : seq) {
        if (toks[i++].key != w) return false;
    }
    return true;
}

std::string join_text(const std::vector<Token>& toks, std::size_t from, std::size_t to) {
    std::vector<std::string> parts;
    for (std::size_t i = from; i < to && i < toks.size(); ++i) parts.push_back(toks[i].text);
    return text::join(parts, " ");
}

std::size_t skip_politeness(const std::vector<Token>& toks) {
    return (!toks.empty() && toks[0].key == "please") ? 1 : 0;
}

// Length of the desire phrase at the start of the input, or 0.
std::size_t desire_prefix(const std::vector<Token>& toks, std::size_t pos) {
    static const std::vector<std::vector<std::string_view>> kPatterns = {
        {"i", "would", "like"}, {"i", "would", "love"}, {"i'd", "like"}, {"i'd", "love"},
        {"i", "want"},          {"i", "wanna"},         {"i", "wish"},   {"i", "desire"},
    };
    for (const auto& p : kPatterns) {
        if (matches_at(toks, pos, p)) return p.size();
    }
    return 0;
}

bool is_adverb(std::string_view key) {
    return (key.size() > 3 && key.ends_with("ly")) ||
           in(key, {"very", "really", "so", "too", "quite", "just", "definitely", "probably", "also", "then",
                    "extremely", "again", "much"});
}

// Index just past the separator of a conditional, or 0 when not conditional.
std::size_t conditional_split(const std::vector<Token>& toks) {
    if (toks.size() < 3 || toks[0].key != "if") return 0;
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
        if (toks[i].ends_clause) return i + 1;
        if (i > 1 && toks[i].key == "then") return i;
    }
    return 0;
}

std::string clause_object(const std::vector<Token>& toks, std::size_t from, std::size_t to, const Lexicon& lexicon) {
    std::size_t i = from;
    while (i < to && toks[i].key == "then") ++i;
    while (i < to && in(toks[i].key, {"i", "you", "we", "they", "he", "she", "it", "someone", "somebody", "i'll",
                                       "you'll", "we'll", "they'll", "he'll", "she'll", "it'll", "i'd", "you'd",
                                       "i'm", "you're", "we're", "they're"})) {
        ++i;
    }
    while (i < to && (in(toks[i].key, {"will", "would", "shall", "should", "can", "could", "may", "might", "must",
                                       "do", "does", "did", "am", "are", "is", "be", "going", "gonna", "to"}) ||
                      is_adverb(toks[i].key))) {
        ++i;
    }
    if (i >= to) return {};
    const std::string verb = toks[i].key;
    ++i;
    while (i < to && in(toks[i].key, {"me", "us", "him", "her", "them", "you", "it"})) ++i;

    std::size_t end = to;
    while (i < end && is_adverb(toks[i].key)) ++i;
    while (end > i && is_adverb(toks[end - 1].key)) --end;
    if (i < end) return join_text(toks, i, end);

    if (in(verb, lexicon.expression_verbs())) return "a " + verb + " face";
    return verb;
}

std::string stem(std::string_view w) {
    if (w.size() > 5 && w.ends_with("ing")) return std::string(w.substr(0, w.size() - 3));
    if (w.size() > 4 && (w.ends_with("ed") || w.ends_with("es"))) return std::string(w.substr(0, w.size() - 2));
    if (w.size() > 3 && w.ends_with('s')) return std::string(w.substr(0, w.size() - 1));
    return std::string(w);
}

}  // namespace

PromptType classify(std::string_view input, const Lexicon& lexicon) {
    const auto toks = tokenize(text::truncate_utf8(input, kClassifyWindow));
    if (conditional_split(toks) != 0) return PromptType::HypothesisBased;
    const std::size_t start = skip_politeness(toks);
    if (start < toks.size() && in(toks[start].key, lexicon.instruction_verbs())) return PromptType::InstructionBased;
    if (desire_prefix(toks, start) != 0) return PromptType::InspirationBased;
    return PromptType::PromptBased;
}

std::string extract_core(std::string_view input, PromptType type, const Lexicon& lexicon) {
    if (type == PromptType::PromptBased) return std::string(input);

    const auto toks = tokenize(text::truncate_utf8(input, kClassifyWindow));
    switch (type) {
        case PromptType::InstructionBased: {
            std::size_t i = skip_politeness(toks);
            if (i < toks.size() && in(toks[i].key, lexicon.instruction_verbs())) ++i;
            while (i < toks.size() && in(toks[i].key, {"me", "us"})) ++i;
            return join_text(toks, i, toks.size());
        }
        case PromptType::InspirationBased: {
            std::size_t i = skip_politeness(toks);
            i += desire_prefix(toks, i);
            if (i < toks.size() && toks[i].key == "to") ++i;
            while (i < toks.size() && in(toks[i].key, {"see", "look", "at", "view", "watch", "have", "get", "imagine",
                                                        "behold", "admire", "for"})) {
                ++i;
            }
            return join_text(toks, i, toks.size());
        }
        case PromptType::HypothesisBased: {
            const std::size_t split = conditional_split(toks);
            if (split == 0) return {};
            std::vector<std::string> parts;
            if (auto cond = clause_object(toks, 1, split, lexicon); !cond.empty()) parts.push_back(std::move(cond));
            if (auto cons = clause_object(toks, split, toks.size(), lexicon); !cons.empty()) {
                parts.push_back(std::move(cons));
            }
            return text::join(parts, " and ");
        }
        case PromptType::PromptBased: break;
    }
    return std::string(input);
}

std::vector<std::string> split_descriptors(std::string_view prompt) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    const auto flush = [&] {
        const auto t = text::trim(cur);
        if (!t.empty()) out.emplace_back(t);
        cur.clear();
    };
    for (char c : prompt) {
        if (c == '(' || c == '[' || c == '{') ++depth;
        if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
        if (c == ',' && depth == 0) {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

std::string quality_suffix(std::string_view example_prompt, const Lexicon& lexicon) {
    constexpr std::size_t kMaxDescriptors = 8;
    const auto segments = split_descriptors(example_prompt);
    std::vector<std::string> picked;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < segments.size() && picked.size() < kMaxDescriptors; ++i) {
        const auto ws = text::words(segments[i]);
        const bool is_quality = std::any_of(ws.begin(), ws.end(), [&](const std::string& w) {
            return in(w, lexicon.quality_keywords());
        });
        if (is_quality && seen.insert(text::to_lower(segments[i])).second) picked.push_back(segments[i]);
    }
    return text::join(picked, ", ");
}

std::string extend_with_examples(std::string_view core, const std::vector<std::string>& examples,
                                 const Lexicon& lexicon) {
    if (examples.empty()) return std::string(core);
    const std::string suffix = quality_suffix(examples.front(), lexicon);
    if (suffix.empty()) return std::string(core);
    return std::string(core) + ", " + suffix;
}

bool preserves_content(std::string_view core, std::string_view candidate) {
    const auto have = text::words(candidate);
    for (const auto& w : text::content_words(core)) {
        const std::string s = stem(w);
        const bool kept = std::any_of(have.begin(), have.end(), [&](const std::string& h) { return h.starts_with(s); });
        if (!kept) return false;
    }
    return true;
}

}  // namespace rules
}  // namespace promptrouter
