#pragma once

#include "promptrouter/config.hpp"
#include "promptrouter/embedder.hpp"
#include "promptrouter/scorers.hpp"

#include "testkit.hpp"

namespace testkit {

/// Scratch copy of the fixture catalog plus a freshly built advantage DB,
/// and a config pointing at both.
struct ServiceFixture {
    TempDir dir;
    promptrouter::ServiceConfig config;

    explicit ServiceFixture(bool with_db = true) {
        fs::copy(catalog_dir(), dir / "catalog", fs::copy_options::recursive);
        config.catalog_dir = dir / "catalog";
        config.templates_dir = templates_dir();
        config.lexicon_path = lexicon_path();
        config.artifact_dir = dir / "artifacts";
        if (with_db) {
            promptrouter::SyntheticAffinityScorer scorer(fixture_lexicon());
            const auto corpus = read_lines(fixtures_dir() / "corpus.txt");
            promptrouter::build_db(corpus, fixture_catalog(), scorer, promptrouter::HashingEmbedder(256))
                .save(dir / "db.json");
            config.db_path = dir / "db.json";
        }
    }
};

inline nlohmann::json new_card_json(const std::string& id) {
    return nlohmann::json{{"id", id},
                          {"name", "New " + id},
                          {"subject_tags", {"people"}},
                          {"style_tags", {"anime"}},
                          {"free_tags", {"knight"}},
                          {"example_prompts", {"portrait of a knight, anime, detailed"}},
                          {"base_model", "sd15"},
                          {"popularity", 10},
                          {"endpoint", nullptr}};
}

}  // namespace testkit
