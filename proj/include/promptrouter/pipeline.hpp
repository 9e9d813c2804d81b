#pragma once

#include "promptrouter/advantage.hpp"
#include "promptrouter/catalog.hpp"
#include "promptrouter/embedder.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/generation.hpp"
#include "promptrouter/lexicon.hpp"
#include "promptrouter/model_tree.hpp"
#include "promptrouter/parser.hpp"
#include "promptrouter/reasoner.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace promptrouter {

/// A stage failure inside route/generate. `stage()` is the pipeline stage
/// name; `client_error()` marks failures caused by the request itself.
class RoutingError : public Error {
public:
    RoutingError(std::string stage, const std::string& message, bool client_error = false)
        : Error(std::move(stage), message), client_error_(client_error) {}

    bool client_error() const noexcept { return client_error_; }

private:
    bool client_error_;
};

struct ExtensionResult {
    std::string text;
    bool fallback = false;

    bool operator==(const ExtensionResult&) const = default;
};

/// Enriches `core` in the style of the card's example prompts via the
/// prompt_extend template. Falls back to `core` (fallback = true) when the
/// reasoner fails or its rewrite drops a content word of `core`; returns
/// `core` untouched (fallback = false) when the card has no examples.
ExtensionResult extend_prompt(std::string_view core, const ModelCard& card, const Reasoner& reasoner,
                              std::size_t max_examples = 3);

struct StageTimings {
    double parse_ms = 0;
    double search_ms = 0;
    double retrieve_ms = 0;
    double select_ms = 0;
    double extend_ms = 0;
    double total_ms = 0;
};

struct RoutingDecision {
    ParsedPrompt parsed;
    CandidateSet candidates;  // tree path, leaf models, and search trace
    ModelGrid grid;
    SelectionOutcome outcome;
    std::string extended_prompt;
    bool extension_fallback = false;
    StageTimings timings;
    std::string config_fingerprint;
};

/// `include_timings = false` gives the deterministic part of the decision.
nlohmann::json to_json(const RoutingDecision& decision, bool include_timings = true);

/// Everything route reads. All references must outlive the call.
struct RoutingContext {
    const Catalog& catalog;
    const ModelTree& tree;
    const AdvantageDB& db;  // an empty DB routes on the tree alone
    const Lexicon& lexicon;
    const Reasoner& reasoner;
    const Embedder& embedder;
};

struct RouteOptions {
    std::size_t max_examples = 3;
    SearchOptions search;
};

/// Hash of catalog version, tree, DB embedder id, and template bodies.
std::string config_fingerprint(const Catalog& catalog, const ModelTree& tree, const AdvantageDB& db,
                               const TemplateSet& templates);

/// parse -> tree search -> similar prompts -> grid -> selection -> extension.
/// Throws RoutingError naming the failing stage; no generation happens here.
RoutingDecision route(std::string_view raw, const RoutingContext& ctx, const RouteOptions& options = {});

/// Sends the decision's extended prompt to the selected model through
/// `dispatcher`.
GenerationResult generate(const RoutingDecision& decision, const Catalog& catalog, const GenerationParams& params,
                          GenerationDispatcher& dispatcher);

}  // namespace promptrouter
