#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

/// Keyword table behind the rule-based reasoner: word -> category weights,
/// plus the word lists the prompt rules are configured with.
///
/// JSON layout:
///   {"categories": {"animals": {"dog": 1.0, "cat": 1.0}, "scenes": ["beach", ...]},
///    "instruction_verbs": [...], "expression_verbs": [...], "quality_keywords": [...]}
/// A category may list plain keywords (weight 1) or an object of weights.
/// Omitted word lists fall back to built-in defaults.
class Lexicon {
public:
    Lexicon();

    static Lexicon from_json(const nlohmann::json& j);
    static Lexicon load(const std::filesystem::path& path);

    /// Weight of `word` toward `category` (both lowercased). Retries with a
    /// trailing plural "s"/"es" stripped when the exact word is unknown.
    double weight(std::string_view word, std::string_view category) const;

    /// Keywords listed for a category, in file order.
    std::vector<std::string> keywords(std::string_view category) const;
    /// Category names, sorted.
    std::vector<std::string> categories() const;

    const std::vector<std::string>& instruction_verbs() const noexcept { return instruction_verbs_; }
    const std::vector<std::string>& expression_verbs() const noexcept { return expression_verbs_; }
    const std::vector<std::string>& quality_keywords() const noexcept { return quality_keywords_; }

    /// Stable digest of the table contents.
    std::string fingerprint() const;

private:
    double exact_weight(std::string_view word, std::string_view category) const;

    std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> weights_;
    std::map<std::string, std::vector<std::string>, std::less<>> by_category_;
    std::vector<std::string> instruction_verbs_;
    std::vector<std::string> expression_verbs_;
    std::vector<std::string> quality_keywords_;
};

/// Token-overlap score of `query_words` against a category label: the sum of
/// lexicon weights toward the label plus 1 for each query word that is itself
/// one of the label's words.
double overlap_score(const Lexicon& lexicon, const std::vector<std::string>& query_words, std::string_view label);

}  // namespace promptrouter
