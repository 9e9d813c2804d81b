#pragma once

#include "promptrouter/lexicon.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace promptrouter {

namespace http {
class ClientPool;
}

/// Template names, one per agent of the workflow.
namespace templates {
inline constexpr std::string_view kPromptParse = "prompt_parse";
inline constexpr std::string_view kTreeBuild = "tree_build";
inline constexpr std::string_view kTreeMatch = "tree_match";
inline constexpr std::string_view kModelSelect = "model_select";
inline constexpr std::string_view kPromptExtend = "prompt_extend";

inline constexpr std::string_view kAll[] = {kPromptParse, kTreeBuild, kTreeMatch, kModelSelect, kPromptExtend};
}  // namespace templates

/// Candidate a caller may append to a choose_label list to let the reasoner
/// say that no existing category fits.
inline constexpr std::string_view kNoneOfThese = "none of these";

/// Every answer must carry one line starting with this marker.
inline constexpr std::string_view kAnswerSentinel = "ANSWER:";

using SlotMap = std::map<std::string, std::string, std::less<>>;

class ReasonerTemplate {
public:
    ReasonerTemplate(std::string name, std::string body);

    const std::string& name() const noexcept { return name_; }
    const std::string& body() const noexcept { return body_; }

    /// Distinct `{slot}` names in order of first appearance.
    const std::vector<std::string>& slots() const noexcept { return slots_; }

    /// Single-pass substitution; substituted text is not rescanned. Throws
    /// ReasonerError(UnfilledSlot) naming every slot missing from `values`.
    std::string fill(const SlotMap& values) const;

private:
    std::string name_;
    std::string body_;
    std::vector<std::string> slots_;
};

class TemplateSet {
public:
    /// Reads `<name>.txt` for each of the five agent templates.
    static TemplateSet load_dir(const std::filesystem::path& dir);

    void add(ReasonerTemplate t);
    const ReasonerTemplate& get(std::string_view name) const;
    bool contains(std::string_view name) const;

    /// Digest over names and bodies, part of the routing config fingerprint.
    std::string fingerprint() const;

private:
    std::map<std::string, ReasonerTemplate, std::less<>> templates_;
};

struct Label {
    std::string value;
    bool operator==(const Label&) const = default;
};
struct LabelList {
    std::vector<std::string> values;
    bool operator==(const LabelList&) const = default;
};
struct Rewrite {
    std::string text;
    bool operator==(const Rewrite&) const = default;
};

struct ReasonerAnswer {
    std::string raw;
    std::variant<Label, LabelList, Rewrite> parsed;

    bool operator==(const ReasonerAnswer&) const = default;
};

/// Structured extraction from a raw answer: the text after the last
/// `ANSWER:` line, shaped per template (label, `|`-separated label list, or
/// rewritten text). Throws ReasonerError(Unparseable) when the sentinel is
/// missing or a label answer is empty.
ReasonerAnswer extract_answer(std::string_view template_name, std::string raw);

/// The language model behind every agent. Implementations must be safe to
/// call from concurrent request handlers.
class Reasoner {
public:
    virtual ~Reasoner() = default;

    virtual ReasonerAnswer ask(std::string_view template_name, const SlotMap& slots) const = 0;

    /// Picks exactly one element of `candidates` for `query`. The default
    /// asks the tree_match template and maps the answer back onto the list.
    virtual std::string choose_label(std::span<const std::string> candidates, std::string_view query) const;

    /// Whether the answers are a pure function of the inputs.
    virtual bool deterministic() const noexcept = 0;
    virtual std::string id() const = 0;

    const TemplateSet& templates() const noexcept { return templates_; }

protected:
    explicit Reasoner(TemplateSet templates) : templates_(std::move(templates)) {}

    const ReasonerTemplate& require(std::string_view name) const;

private:
    TemplateSet templates_;
};

/// Offline reasoner: keyword lexicon plus the deterministic prompt rules.
class RuleBasedReasoner final : public Reasoner {
public:
    RuleBasedReasoner(TemplateSet templates, Lexicon lexicon);

    ReasonerAnswer ask(std::string_view template_name, const SlotMap& slots) const override;

    /// Highest overlap_score wins, earliest candidate on ties. A trailing
    /// kNoneOfThese candidate is returned only when every other candidate
    /// scores zero.
    std::string choose_label(std::span<const std::string> candidates, std::string_view query) const override;

    bool deterministic() const noexcept override { return true; }
    std::string id() const override;

    const Lexicon& lexicon() const noexcept { return lexicon_; }

private:
    std::string answer_text(std::string_view template_name, const SlotMap& slots) const;

    Lexicon lexicon_;
};

struct RemoteReasonerOptions {
    std::string base_url;  // e.g. http://localhost:8000
    std::string model = "gpt-3.5-turbo";
    std::string api_key;   // empty: read PROMPTROUTER_LLM_KEY
    std::chrono::milliseconds timeout{30'000};
    std::size_t pool_size = 4;
};

/// Chat-completion client: one user message per ask, temperature 0. A
/// transport failure is retried once; an answer without the sentinel is
/// re-asked once before giving up.
class RemoteReasoner final : public Reasoner {
public:
    RemoteReasoner(TemplateSet templates, RemoteReasonerOptions options);
    ~RemoteReasoner() override;

    ReasonerAnswer ask(std::string_view template_name, const SlotMap& slots) const override;
    bool deterministic() const noexcept override { return false; }
    std::string id() const override;

private:
    std::string complete(const std::string& prompt) const;

    RemoteReasonerOptions options_;
    std::string path_;
    std::unique_ptr<http::ClientPool> pool_;
};

}  // namespace promptrouter
