#include "promptrouter/lexicon.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/text.hpp"

#include <algorithm>
#include <fstream>

namespace promptrouter {

using nlohmann::json;

namespace {

const std::vector<std::string> kDefaultInstructionVerbs = {
    "generate", "draw", "create", "make", "show", "paint", "render", "sketch", "illustrate", "depict", "design",
};

const std::vector<std::string> kDefaultExpressionVerbs = {
    "laugh", "smile", "cry", "weep", "frown", "grin", "scream", "sob", "giggle", "pout",
};

const std::vector<std::string> kDefaultQualityKeywords = {
    "quality",   "masterpiece", "detailed",   "details",      "detail",    "hyperdetailed", "intricate",
    "hdr",       "uhd",         "4k",         "8k",           "render",    "octane",        "unreal",
    "sharp",     "focus",       "realistic",  "hyperrealism", "photorealistic", "photorealism", "cinematic",
    "lighting",  "light",       "resolution", "highres",      "professional", "dslr",       "bokeh",
    "award",     "ultra",       "vibrant",    "texture",
};

std::vector<std::string> string_list_or(const json& j, const char* key, const std::vector<std::string>& fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& v : j.at(key)) out.push_back(text::to_lower(v.get<std::string>()));
    return out;
}

}  // namespace

Lexicon::Lexicon()
    : instruction_verbs_(kDefaultInstructionVerbs),
      expression_verbs_(kDefaultExpressionVerbs),
      quality_keywords_(kDefaultQualityKeywords) {}

Lexicon Lexicon::from_json(const json& j) {
    Lexicon lex;
    try {
        if (const auto it = j.find("categories"); it != j.end()) {
            for (const auto& [raw_category, entries] : it->items()) {
                const std::string category = text::normalize_label(raw_category);
                auto& listed = lex.by_category_[category];
                const auto add = [&](const std::string& raw_word, double w) {
                    const std::string word = text::to_lower(raw_word);
                    lex.weights_[word][category] += w;
                    listed.push_back(word);
                };
                if (entries.is_array()) {
                    for (const auto& word : entries) add(word.get<std::string>(), 1.0);
                } else {
                    for (const auto& [word, w] : entries.items()) add(word, w.get<double>());
                }
            }
        }
        lex.instruction_verbs_ = string_list_or(j, "instruction_verbs", kDefaultInstructionVerbs);
        lex.expression_verbs_ = string_list_or(j, "expression_verbs", kDefaultExpressionVerbs);
        lex.quality_keywords_ = string_list_or(j, "quality_keywords", kDefaultQualityKeywords);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed lexicon: ") + e.what());
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed lexicon " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

double Lexicon::exact_weight(std::string_view word, std::string_view category) const {
    const auto w = weights_.find(word);
    if (w == weights_.end()) return 0.0;
    const auto c = w->second.find(category);
    return c == w->second.end() ? 0.0 : c->second;
}

double Lexicon::weight(std::string_view word, std::string_view category) const {
    if (weights_.find(word) != weights_.end()) return exact_weight(word, category);
    if (word.size() > 3 && word.ends_with("es")) {
        if (const double w = exact_weight(word.substr(0, word.size() - 2), category); w != 0.0) return w;
    }
    if (word.size() > 2 && word.ends_with('s')) return exact_weight(word.substr(0, word.size() - 1), category);
    return 0.0;
}

std::vector<std::string> Lexicon::keywords(std::string_view category) const {
    const auto it = by_category_.find(category);
    return it == by_category_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Lexicon::categories() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : by_category_) out.push_back(name);
    return out;
}

std::string Lexicon::fingerprint() const {
    json j;
    j["weights"] = json::object();
    for (const auto& [word, cats] : weights_) {
        for (const auto& [cat, w] : cats) j["weights"][word][cat] = w;
    }
    j["instruction_verbs"] = instruction_verbs_;
    j["expression_verbs"] = expression_verbs_;
    j["quality_keywords"] = quality_keywords_;
    return codec::sha256_hex(j.dump());
}

double overlap_score(const Lexicon& lexicon, const std::vector<std::string>& query_words, std::string_view label) {
    const auto label_words = text::words(label);
    const auto singular = [](std::string_view w) {
        return (w.size() > 2 && w.ends_with('s')) ? w.substr(0, w.size() - 1) : w;
    };
    double score = 0.0;
    for (const auto& word : query_words) {
        score += lexicon.weight(word, label);
        const bool names_label = std::any_of(label_words.begin(), label_words.end(), [&](const std::string& lw) {
            return lw == word || singular(lw) == singular(word);
        });
        if (names_label) score += 1.0;
    }
    return score;
}

}  // namespace promptrouter
