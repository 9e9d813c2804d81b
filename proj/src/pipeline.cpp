#include "promptrouter/pipeline.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/prompt_rules.hpp"
#include "promptrouter/text.hpp"

#include <algorithm>
#include <chrono>

namespace promptrouter {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double since_ms(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

// Runs one stage, rethrowing any library error as a RoutingError tagged with
// the stage name.
template <typename F>
auto run_stage(const char* stage, double& elapsed, F&& fn) -> decltype(fn()) {
    const auto started = Clock::now();
    try {
        auto result = fn();
        elapsed = since_ms(started);
        return result;
    } catch (const RoutingError&) {
        throw;
    } catch (const ParseError& e) {
        throw RoutingError(stage, e.what(), true);
    } catch (const Error& e) {
        throw RoutingError(stage, e.what());
    }
}

}  // namespace

ExtensionResult extend_prompt(std::string_view core, const ModelCard& card, const Reasoner& reasoner,
                              std::size_t max_examples) {
    if (card.example_prompts.empty() || max_examples == 0) return {std::string(core), false};

    std::vector<std::string> examples;
    for (std::size_t i = 0; i < card.example_prompts.size() && i < max_examples; ++i) {
        auto line = card.example_prompts[i];
        std::replace(line.begin(), line.end(), '\n', ' ');
        examples.push_back(std::move(line));
    }
    std::string rewritten;
    try {
        const auto answer = reasoner.ask(templates::kPromptExtend,
                                         {{"prompt", std::string(core)}, {"examples", text::join(examples, "\n")}});
        rewritten = std::get<Rewrite>(answer.parsed).text;
    } catch (const ReasonerError&) {
        return {std::string(core), true};
    }
    if (text::trim(rewritten).empty() || !rules::preserves_content(core, rewritten)) {
        return {std::string(core), true};
    }
    return {std::move(rewritten), false};
}

json to_json(const RoutingDecision& d, bool include_timings) {
    json trace = json::array();
    for (const auto& step : d.candidates.trace) {
        trace.push_back({{"candidates", step.candidates}, {"query", step.query}, {"chosen", step.chosen}});
    }
    json rows = json::array();
    for (const auto& row : d.grid.rows) {
        json ranked = json::array();
        for (const auto& m : row.ranked_models) {
            ranked.push_back({{"model_id", m.model_id}, {"rank", m.rank}, {"score", m.score}});
        }
        rows.push_back({{"prompt_id", row.prompt_id}, {"similarity", row.similarity}, {"ranked_models", ranked}});
    }
    json tally = json::array();
    for (const auto& t : d.outcome.tally) {
        tally.push_back({{"model_id", t.model_id}, {"occurrence_count", t.occurrence_count}, {"mean_rank", t.mean_rank}});
    }
    json j{{"parsed",
            {{"raw", d.parsed.raw},
             {"prompt_type", to_string(d.parsed.prompt_type)},
             {"core", d.parsed.core},
             {"core_fallback", d.parsed.core_fallback}}},
           {"tree_path", {{"subject", d.candidates.subject}, {"style", d.candidates.style}}},
           {"tree_candidates", d.candidates.model_ids},
           {"search_trace", std::move(trace)},
           {"grid", {{"rows", std::move(rows)}}},
           {"outcome",
            {{"model_id", d.outcome.model_id}, {"source", to_string(d.outcome.source)}, {"tally", std::move(tally)}}},
           {"extended_prompt", d.extended_prompt},
           {"extension_fallback", d.extension_fallback},
           {"config_fingerprint", d.config_fingerprint}};
    if (include_timings) {
        j["timings_ms"] = {{"parse", d.timings.parse_ms},       {"search", d.timings.search_ms},
                           {"retrieve", d.timings.retrieve_ms}, {"select", d.timings.select_ms},
                           {"extend", d.timings.extend_ms},     {"total", d.timings.total_ms}};
    }
    return j;
}

std::string config_fingerprint(const Catalog& catalog, const ModelTree& tree, const AdvantageDB& db,
                               const TemplateSet& templates) {
    const json j{{"catalog_version", catalog.version()},
                 {"tree", tree},
                 {"embedder_id", db.embedder_id()},
                 {"templates", templates.fingerprint()}};
    return codec::sha256_hex(j.dump());
}

RoutingDecision route(std::string_view raw, const RoutingContext& ctx, const RouteOptions& options) {
    const auto started = Clock::now();
    if (ctx.tree.catalog_version != ctx.catalog.version()) {
        throw RoutingError("snapshot", "tree was built for catalog version " + std::to_string(ctx.tree.catalog_version) +
                                           " but the catalog is at version " + std::to_string(ctx.catalog.version()));
    }

    RoutingDecision d;
    d.parsed = run_stage("parser", d.timings.parse_ms, [&] { return parse_prompt(raw, ctx.lexicon, ctx.reasoner); });
    d.candidates = run_stage("model-tree", d.timings.search_ms,
                             [&] { return search_tree(ctx.tree, d.parsed.core, ctx.reasoner, options.search); });
    d.grid = run_stage("advantage", d.timings.retrieve_ms, [&] {
        if (ctx.db.empty()) return ModelGrid{};
        const auto similar = top_similar_prompts(ctx.db, ctx.embedder, d.parsed.core);
        return build_grid(ctx.db, similar, [&](std::string_view id) { return ctx.catalog.contains(id); });
    });
    d.outcome = run_stage("selection", d.timings.select_ms, [&] {
        return select_model(d.grid, d.candidates.model_ids, [&](std::string_view id) {
            const auto* card = ctx.catalog.find(id);
            return card == nullptr ? std::int64_t{0} : card->popularity;
        });
    });
    const ModelCard* card = ctx.catalog.find(d.outcome.model_id);
    if (card == nullptr) {
        throw RoutingError("selection", "selected model '" + d.outcome.model_id + "' is not in the catalog");
    }
    const auto extension = run_stage("extension", d.timings.extend_ms, [&] {
        return extend_prompt(d.parsed.core, *card, ctx.reasoner, options.max_examples);
    });
    d.extended_prompt = extension.text;
    d.extension_fallback = extension.fallback;
    d.config_fingerprint = config_fingerprint(ctx.catalog, ctx.tree, ctx.db, ctx.reasoner.templates());
    d.timings.total_ms = since_ms(started);
    return d;
}

GenerationResult generate(const RoutingDecision& decision, const Catalog& catalog, const GenerationParams& params,
                          GenerationDispatcher& dispatcher) {
    const ModelCard* card = catalog.find(decision.outcome.model_id);
    if (card == nullptr) {
        throw GenerationError(GenerationError::Kind::InvalidRequest,
                              "model '" + decision.outcome.model_id + "' is not in the catalog",
                              decision.outcome.model_id);
    }
    const GenerationRequest request{decision.extended_prompt, params.width, params.height, params.steps, params.seed,
                                    card->id};
    return dispatcher.dispatch(request, *card);
}

}  // namespace promptrouter
