#include "promptrouter/advantage.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace promptrouter {

using nlohmann::json;

namespace {

constexpr double kNormTolerance = 1e-6;

struct Tally {
    std::string id;
    int count = 0;
    long long rank_sum = 0;
};

// (count desc, mean rank asc, id asc); mean ranks compared by cross-multiplying
// so equal rationals never split on rounding
bool ranks_before(const Tally& a, const Tally& b) {
    if (a.count != b.count) return a.count > b.count;
    const long long lhs = a.rank_sum * b.count;
    const long long rhs = b.rank_sum * a.count;
    if (lhs != rhs) return lhs < rhs;
    return a.id < b.id;
}

}  // namespace

AdvantageDB::AdvantageDB(std::string embedder_id, std::size_t d, std::size_t k_prompts, std::size_t k_models,
                         std::vector<CorpusPrompt> prompts, std::vector<std::string> model_ids,
                         std::vector<double> scores, std::vector<double> embeddings)
    : embedder_id_(std::move(embedder_id)),
      d_(d),
      k_prompts_(k_prompts),
      k_models_(k_models),
      prompts_(std::move(prompts)),
      model_ids_(std::move(model_ids)),
      scores_(std::move(scores)),
      embeddings_(std::move(embeddings)) {
    if (d_ == 0) throw AdvantageError("embedding dimension must be positive");
    if (k_prompts_ == 0 || k_models_ == 0) throw AdvantageError("k_prompts and k_models must be at least 1");
    for (std::size_t i = 0; i < prompts_.size(); ++i) {
        if (prompts_[i].id != static_cast<std::int64_t>(i)) throw AdvantageError("prompt ids must be 0..n-1 in order");
    }
    std::set<std::string_view> seen;
    for (const auto& id : model_ids_) {
        if (id.empty() || !seen.insert(id).second) throw AdvantageError("model ids must be non-empty and unique");
    }
    if (scores_.size() != model_ids_.size() * prompts_.size()) {
        throw AdvantageError("score matrix must be models x prompts");
    }
    if (!std::all_of(scores_.begin(), scores_.end(), [](double s) { return std::isfinite(s); })) {
        throw AdvantageError("score matrix holds non-finite values");
    }
    if (embeddings_.size() != prompts_.size() * d_) throw AdvantageError("embedding matrix must be prompts x d");
    for (std::size_t i = 0; i < prompts_.size(); ++i) {
        const auto e = embedding(i);
        const double norm = std::sqrt(dot(e, e));
        if (std::abs(norm - 1.0) > kNormTolerance) {
            throw AdvantageError("embedding of prompt " + std::to_string(i) + " is not unit-norm");
        }
    }
}

AdvantageDB AdvantageDB::with_k(std::size_t k_prompts, std::size_t k_models) const {
    return AdvantageDB(embedder_id_, d_, k_prompts, k_models, prompts_, model_ids_, scores_, embeddings_);
}

json AdvantageDB::to_json() const {
    json prompts = json::array();
    for (const auto& p : prompts_) prompts.push_back({{"id", p.id}, {"text", p.text}});
    return json{{"embedder_id", embedder_id_},
                {"d", d_},
                {"k_prompts", k_prompts_},
                {"k_models", k_models_},
                {"prompts", std::move(prompts)},
                {"model_ids", model_ids_},
                {"scores_b64", codec::encode_f64(scores_)},
                {"embeddings_b64", codec::encode_f64(embeddings_)}};
}

AdvantageDB AdvantageDB::from_json(const json& j) {
    try {
        std::vector<CorpusPrompt> prompts;
        for (const auto& p : j.at("prompts")) {
            prompts.push_back(CorpusPrompt{p.at("id").get<std::int64_t>(), p.at("text").get<std::string>()});
        }
        return AdvantageDB(j.at("embedder_id").get<std::string>(), j.at("d").get<std::size_t>(),
                           j.at("k_prompts").get<std::size_t>(), j.at("k_models").get<std::size_t>(),
                           std::move(prompts), j.at("model_ids").get<std::vector<std::string>>(),
                           codec::decode_f64(j.at("scores_b64").get<std::string>()),
                           codec::decode_f64(j.at("embeddings_b64").get<std::string>()));
    } catch (const json::exception& e) {
        throw AdvantageError(std::string("malformed advantage DB: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw AdvantageError(std::string("malformed advantage DB payload: ") + e.what());
    }
}

void AdvantageDB::save(const std::filesystem::path& path) const {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw AdvantageError("cannot write " + tmp.string());
        out << to_json().dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

AdvantageDB AdvantageDB::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AdvantageError("cannot open advantage DB " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw AdvantageError("malformed advantage DB " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

AdvantageDB build_db(std::span<const std::string> corpus, const Catalog& catalog, Scorer& scorer,
                     const Embedder& embedder, DbOptions options) {
    if (corpus.empty()) throw AdvantageError("prompt corpus is empty");

    std::vector<CorpusPrompt> prompts;
    std::vector<double> embeddings;
    embeddings.reserve(corpus.size() * embedder.dimension());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto e = embedder.embed(corpus[i]);
        if (e.size() != embedder.dimension()) throw AdvantageError("embedder returned a vector of the wrong dimension");
        embeddings.insert(embeddings.end(), e.begin(), e.end());
        prompts.push_back(CorpusPrompt{static_cast<std::int64_t>(i), corpus[i]});
    }

    std::vector<double> scores;
    scores.reserve(catalog.size() * corpus.size());
    for (const auto& card : catalog.cards()) {
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            double s = 0.0;
            try {
                s = scorer.score(card, corpus[i]);
            } catch (const std::exception& e) {
                throw AdvantageError("scorer failed on model '" + card.id + "', prompt " + std::to_string(i) + ": " +
                                     e.what());
            }
            if (!std::isfinite(s)) {
                throw AdvantageError("scorer returned a non-finite score for model '" + card.id + "', prompt " +
                                     std::to_string(i));
            }
            scores.push_back(s);
        }
    }
    return AdvantageDB(embedder.id(), embedder.dimension(), options.k_prompts, options.k_models, std::move(prompts),
                       catalog.ids(), std::move(scores), std::move(embeddings));
}

std::vector<SimilarPrompt> top_similar_prompts(const AdvantageDB& db, std::span<const double> query) {
    if (query.size() != db.dimension()) {
        throw AdvantageError("query dimension " + std::to_string(query.size()) + " does not match DB dimension " +
                             std::to_string(db.dimension()));
    }
    std::vector<SimilarPrompt> all;
    all.reserve(db.prompt_count());
    for (std::size_t i = 0; i < db.prompt_count(); ++i) {
        all.push_back(SimilarPrompt{static_cast<std::int64_t>(i), dot(db.embedding(i), query)});
    }
    const std::size_t k = std::min(db.k_prompts(), all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const SimilarPrompt& a, const SimilarPrompt& b) {
                          if (a.similarity != b.similarity) return a.similarity > b.similarity;
                          return a.prompt_id < b.prompt_id;
                      });
    all.resize(k);
    return all;
}

std::vector<SimilarPrompt> top_similar_prompts(const AdvantageDB& db, const Embedder& embedder, std::string_view core) {
    if (embedder.id() != db.embedder_id() || embedder.dimension() != db.dimension()) {
        throw AdvantageError("embedder '" + embedder.id() + "' (d=" + std::to_string(embedder.dimension()) +
                             ") does not match DB embedder '" + db.embedder_id() +
                             "' (d=" + std::to_string(db.dimension()) + ")");
    }
    return top_similar_prompts(db, embedder.embed(core));
}

std::vector<RankedModel> top_models_for_prompt(const AdvantageDB& db, std::int64_t prompt_id, const ModelFilter& admit) {
    if (prompt_id < 0 || static_cast<std::size_t>(prompt_id) >= db.prompt_count()) {
        throw AdvantageError("unknown prompt id " + std::to_string(prompt_id));
    }
    const auto pid = static_cast<std::size_t>(prompt_id);
    std::vector<std::size_t> idx;
    for (std::size_t m = 0; m < db.model_count(); ++m) {
        if (!admit || admit(db.model_ids()[m])) idx.push_back(m);
    }
    const std::size_t k = std::min(db.k_models(), idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double sa = db.score(a, pid);
                          const double sb = db.score(b, pid);
                          if (sa != sb) return sa > sb;
                          return db.model_ids()[a] < db.model_ids()[b];
                      });
    std::vector<RankedModel> out;
    for (std::size_t r = 0; r < k; ++r) {
        out.push_back(RankedModel{db.model_ids()[idx[r]], static_cast<int>(r + 1), db.score(idx[r], pid)});
    }
    return out;
}

ModelGrid build_grid(const AdvantageDB& db, std::span<const SimilarPrompt> similar, const ModelFilter& admit) {
    ModelGrid grid;
    for (const auto& s : similar) {
        grid.rows.push_back(GridRow{s.prompt_id, s.similarity, top_models_for_prompt(db, s.prompt_id, admit)});
    }
    return grid;
}

std::string_view to_string(SelectionSource source) noexcept {
    switch (source) {
        case SelectionSource::Intersection: return "intersection";
        case SelectionSource::GridFallback: return "grid_fallback";
        case SelectionSource::TreeFallback: return "tree_fallback";
    }
    return "intersection";
}

SelectionOutcome select_model(const ModelGrid& grid, std::span<const std::string> tree_candidates,
                              const PopularityLookup& popularity) {
    std::map<std::string, Tally> by_id;
    for (const auto& row : grid.rows) {
        std::set<std::string_view> in_row;
        for (const auto& m : row.ranked_models) {
            if (!in_row.insert(m.model_id).second) continue;
            auto& t = by_id[m.model_id];
            t.id = m.model_id;
            t.count += 1;
            t.rank_sum += m.rank;
        }
    }
    std::vector<Tally> ordered;
    for (auto& [id, t] : by_id) ordered.push_back(std::move(t));
    std::sort(ordered.begin(), ordered.end(), ranks_before);

    SelectionOutcome out;
    for (const auto& t : ordered) {
        out.tally.push_back(TallyEntry{t.id, t.count, static_cast<double>(t.rank_sum) / t.count});
    }

    const std::set<std::string_view> candidates(tree_candidates.begin(), tree_candidates.end());
    for (const auto& t : ordered) {
        if (candidates.count(t.id) != 0) {
            out.model_id = t.id;
            out.source = SelectionSource::Intersection;
            return out;
        }
    }
    if (!ordered.empty()) {
        out.model_id = ordered.front().id;
        out.source = SelectionSource::GridFallback;
        return out;
    }
    if (tree_candidates.empty()) throw AdvantageError("no grid models and no tree candidates to select from");

    const auto pop = [&](std::string_view id) -> std::int64_t { return popularity ? popularity(id) : 0; };
    const auto best = std::min_element(tree_candidates.begin(), tree_candidates.end(),
                                       [&](const std::string& a, const std::string& b) {
                                           const auto pa = pop(a);
                                           const auto pb = pop(b);
                                           if (pa != pb) return pa > pb;
                                           return a < b;
                                       });
    out.model_id = *best;
    out.source = SelectionSource::TreeFallback;
    return out;
}

}  // namespace promptrouter
