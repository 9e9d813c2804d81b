#pragma once

#include "promptrouter/lexicon.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

enum class PromptType { PromptBased, InstructionBased, InspirationBased, HypothesisBased };

std::string_view to_string(PromptType type) noexcept;
std::optional<PromptType> prompt_type_from_string(std::string_view name) noexcept;

/// Deterministic text rules used by the offline reasoner and by the parser's
/// classifier. Everything here is a pure function of its arguments.
namespace rules {

/// Conditional ("if ..., ...") > imperative generation verb > desire
/// ("I want / I'd like / I wish ...") > plain prompt.
PromptType classify(std::string_view input, const Lexicon& lexicon);

/// Core prompt for a classified input. May return an empty string when the
/// pattern leaves nothing behind (e.g. "I want to see").
std::string extract_core(std::string_view input, PromptType type, const Lexicon& lexicon);

/// Comma-separated segments at bracket depth zero, trimmed, empties dropped.
std::vector<std::string> split_descriptors(std::string_view prompt);

/// Quality descriptors of an example prompt: every segment after the first
/// that mentions a quality keyword, deduplicated, at most eight.
std::string quality_suffix(std::string_view example_prompt, const Lexicon& lexicon);

/// `core` plus the quality suffix of the first example, or `core` unchanged
/// when there is no example or no suffix.
std::string extend_with_examples(std::string_view core, const std::vector<std::string>& examples,
                                 const Lexicon& lexicon);

/// True when every non-stopword word of `core` survives in `candidate`. A word
/// survives if its stem prefixes some candidate word ("fashion" is kept by
/// "fashionable", "laughing" by "laughs").
bool preserves_content(std::string_view core, std::string_view candidate);

}  // namespace rules
}  // namespace promptrouter
