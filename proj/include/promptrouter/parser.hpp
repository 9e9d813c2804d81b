#pragma once

#include "promptrouter/lexicon.hpp"
#include "promptrouter/prompt_rules.hpp"
#include "promptrouter/reasoner.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

struct ParsedPrompt {
    std::string raw;
    PromptType prompt_type = PromptType::PromptBased;
    std::string core;
    /// Set when extraction came back empty and `core` fell back to `raw`.
    bool core_fallback = false;

    bool operator==(const ParsedPrompt&) const = default;
};

/// Throws ParseError when `raw` is blank.
PromptType classify(std::string_view raw, const Lexicon& lexicon);

/// PromptBased inputs are returned verbatim without consulting the reasoner;
/// the other types go through the prompt_parse template.
ParsedPrompt extract_core(std::string_view raw, PromptType type, const Reasoner& reasoner);

/// classify + extract_core.
ParsedPrompt parse_prompt(std::string_view raw, const Lexicon& lexicon, const Reasoner& reasoner);

}  // namespace promptrouter
