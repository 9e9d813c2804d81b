#include "promptrouter/parser.hpp"

#include "promptrouter/errors.hpp"
#include "promptrouter/text.hpp"

namespace promptrouter {

namespace {

constexpr std::size_t kReasonerWindow = 1000;

}  // namespace

PromptType classify(std::string_view raw, const Lexicon& lexicon) {
    if (text::trim(raw).empty()) throw ParseError("prompt is empty");
    return rules::classify(raw, lexicon);
}

ParsedPrompt extract_core(std::string_view raw, PromptType type, const Reasoner& reasoner) {
    if (text::trim(raw).empty()) throw ParseError("prompt is empty");

    ParsedPrompt parsed{std::string(raw), type, {}, false};
    if (type == PromptType::PromptBased) {
        parsed.core = parsed.raw;
        return parsed;
    }

    const auto answer = reasoner.ask(templates::kPromptParse,
                                     {{"prompt", std::string(text::truncate_utf8(raw, kReasonerWindow))},
                                      {"prompt_type", std::string(to_string(type))}});
    std::string core = std::get<Rewrite>(answer.parsed).text;
    if (text::trim(core).empty()) {
        parsed.core = parsed.raw;
        parsed.core_fallback = true;
    } else {
        parsed.core = std::move(core);
    }
    return parsed;
}

ParsedPrompt parse_prompt(std::string_view raw, const Lexicon& lexicon, const Reasoner& reasoner) {
    return extract_core(raw, classify(raw, lexicon), reasoner);
}

}  // namespace promptrouter
