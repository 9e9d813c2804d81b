#pragma once

#include "promptrouter/catalog.hpp"
#include "promptrouter/embedder.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

struct CorpusPrompt {
    std::int64_t id = 0;
    std::string text;

    bool operator==(const CorpusPrompt&) const = default;
};

/// Prompt corpus, its embeddings, and a dense reward-score matrix over
/// (model, prompt). Read-only once built.
class AdvantageDB {
public:
    AdvantageDB() = default;
    /// `scores` is row-major models x prompts, `embeddings` row-major
    /// prompts x d. Throws AdvantageError if shapes, ids, or norms are off.
    AdvantageDB(std::string embedder_id, std::size_t d, std::size_t k_prompts, std::size_t k_models,
                std::vector<CorpusPrompt> prompts, std::vector<std::string> model_ids, std::vector<double> scores,
                std::vector<double> embeddings);

    const std::string& embedder_id() const noexcept { return embedder_id_; }
    std::size_t dimension() const noexcept { return d_; }
    std::size_t k_prompts() const noexcept { return k_prompts_; }
    std::size_t k_models() const noexcept { return k_models_; }
    const std::vector<CorpusPrompt>& prompts() const noexcept { return prompts_; }
    const std::vector<std::string>& model_ids() const noexcept { return model_ids_; }
    std::size_t prompt_count() const noexcept { return prompts_.size(); }
    std::size_t model_count() const noexcept { return model_ids_.size(); }
    bool empty() const noexcept { return prompts_.empty(); }

    double score(std::size_t model_index, std::size_t prompt_id) const {
        return scores_[model_index * prompts_.size() + prompt_id];
    }
    std::span<const double> embedding(std::size_t prompt_id) const {
        return {embeddings_.data() + prompt_id * d_, d_};
    }
    const std::vector<double>& scores() const noexcept { return scores_; }
    const std::vector<double>& embeddings() const noexcept { return embeddings_; }

    /// Same DB with different grid sizes.
    AdvantageDB with_k(std::size_t k_prompts, std::size_t k_models) const;

    nlohmann::json to_json() const;
    static AdvantageDB from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static AdvantageDB load(const std::filesystem::path& path);

    bool operator==(const AdvantageDB&) const = default;

private:
    std::string embedder_id_;
    std::size_t d_ = 0;
    std::size_t k_prompts_ = 5;
    std::size_t k_models_ = 5;
    std::vector<CorpusPrompt> prompts_;
    std::vector<std::string> model_ids_;
    std::vector<double> scores_;
    std::vector<double> embeddings_;
};

/// Reward model over (model, prompt). Implementations throw on failure.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual double score(const ModelCard& model, std::string_view prompt) = 0;
};

struct DbOptions {
    std::size_t k_prompts = 5;
    std::size_t k_models = 5;
};

/// Scores every (model, prompt) pair. Any scorer failure or non-finite score
/// aborts the build; no partial DB is returned.
AdvantageDB build_db(std::span<const std::string> corpus, const Catalog& catalog, Scorer& scorer,
                     const Embedder& embedder, DbOptions options = {});

struct SimilarPrompt {
    std::int64_t prompt_id = 0;
    double similarity = 0.0;

    bool operator==(const SimilarPrompt&) const = default;
};

/// The k_prompts most similar corpus prompts, similarity descending, ties by
/// smaller prompt id. Exact scan.
std::vector<SimilarPrompt> top_similar_prompts(const AdvantageDB& db, std::span<const double> query);
/// Embeds `core` first; the embedder must match the one the DB was built with.
std::vector<SimilarPrompt> top_similar_prompts(const AdvantageDB& db, const Embedder& embedder, std::string_view core);

struct RankedModel {
    std::string model_id;
    int rank = 0;
    double score = 0.0;

    bool operator==(const RankedModel&) const = default;
};

/// Restricts which DB models may enter a ranking (e.g. only those still in
/// the catalog). An empty function admits every model.
using ModelFilter = std::function<bool(std::string_view)>;

/// The k_models best-scoring models for one prompt; ties by model id.
std::vector<RankedModel> top_models_for_prompt(const AdvantageDB& db, std::int64_t prompt_id,
                                               const ModelFilter& admit = {});

struct GridRow {
    std::int64_t prompt_id = 0;
    double similarity = 0.0;
    std::vector<RankedModel> ranked_models;

    bool operator==(const GridRow&) const = default;
};

struct ModelGrid {
    std::vector<GridRow> rows;

    bool operator==(const ModelGrid&) const = default;
};

ModelGrid build_grid(const AdvantageDB& db, std::span<const SimilarPrompt> similar, const ModelFilter& admit = {});

enum class SelectionSource { Intersection, GridFallback, TreeFallback };

std::string_view to_string(SelectionSource source) noexcept;

struct TallyEntry {
    std::string model_id;
    int occurrence_count = 0;
    double mean_rank = 0.0;

    bool operator==(const TallyEntry&) const = default;
};

struct SelectionOutcome {
    std::string model_id;
    SelectionSource source = SelectionSource::Intersection;
    /// Every grid model, best first under the selection ordering.
    std::vector<TallyEntry> tally;

    bool operator==(const SelectionOutcome&) const = default;
};

using PopularityLookup = std::function<std::int64_t(std::string_view)>;

/// Prefers grid models that are also tree candidates, ordered by
/// (occurrence count desc, mean rank asc, id asc); falls back to the best
/// grid model, then to the most popular tree candidate (id asc on ties).
/// Throws AdvantageError when both the grid and the candidates are empty.
SelectionOutcome select_model(const ModelGrid& grid, std::span<const std::string> tree_candidates,
                              const PopularityLookup& popularity = {});

}  // namespace promptrouter
