#include "promptrouter/errors.hpp"
#include "promptrouter/model_tree.hpp"
#include "promptrouter/text.hpp"

#include "generators.hpp"
#include "testkit.hpp"

#include <doctest.h>

#include <random>

using namespace promptrouter;
using testkit::make_card;

namespace {

void check_trace_replays(const CandidateSet& found, const Reasoner& reasoner) {
    REQUIRE_FALSE(found.trace.empty());
    for (const auto& step : found.trace) {
        CHECK(std::find(step.candidates.begin(), step.candidates.end(), step.chosen) != step.candidates.end());
        CHECK(reasoner.choose_label(step.candidates, step.query) == step.chosen);
    }
}

}  // namespace

TEST_CASE("a single-card catalog gives a single-leaf tree that every search reaches") {
    const auto reasoner = testkit::rule_reasoner();
    const Catalog catalog({make_card("solo", {"people"}, {"anime"})}, 1);
    const auto tree = build_tree(catalog, reasoner);
    REQUIRE(tree.subjects.size() == 1);
    REQUIRE(tree.subjects[0].styles.size() == 1);
    CHECK(tree.model_ids() == std::vector<std::string>{"solo"});
    for (const auto* q : {"a dog", "an abstract collage", "zzz"}) {
        CHECK(search_tree(tree, q, reasoner).model_ids == std::vector<std::string>{"solo"});
    }
}

TEST_CASE("fixture tree partitions the catalog along subject and style") {
    const auto reasoner = testkit::rule_reasoner();
    const auto catalog = testkit::fixture_catalog();
    const auto tree = build_tree(catalog, reasoner);
    CHECK(testkit::partition_problem(tree, catalog).empty());
    CHECK(check_tree(tree).empty());
    CHECK(tree.catalog_version == catalog.version());

    for (const auto& card : catalog.cards()) {
        CAPTURE(card.id);
        const auto leaf = tree.leaf_of(card.id);
        REQUIRE(leaf.has_value());
        CHECK(leaf->first == text::normalize_label(card.subject_tags.front()));
        if (card.style_tags.empty()) {
            CHECK(leaf->second == kGeneralStyle);
        } else {
            CHECK(leaf->second == text::normalize_label(card.style_tags.front()));
        }
    }
    CHECK(tree.leaf_of("eclectic-figures") == std::make_pair(std::string("people"), std::string("general")));
}

TEST_CASE("insert places a card under an existing subject") {
    const auto reasoner = testkit::rule_reasoner();
    const auto catalog = testkit::fixture_catalog();
    const auto tree = build_tree(catalog, reasoner);
    auto card = make_card("newmodel", {"people"}, {"anime"});
    card.example_prompts = {"portrait of a knight, anime"};

    const auto next = insert_model(tree, card, reasoner);
    CHECK(next.catalog_version == tree.catalog_version + 1);
    CHECK(next.leaf_of("newmodel") == std::make_pair(std::string("people"), std::string("anime")));
    CHECK_FALSE(tree.contains("newmodel"));
    CHECK(check_tree(next).empty());

    const auto found = search_tree(next, card.example_prompts.front(), reasoner);
    CHECK(std::find(found.model_ids.begin(), found.model_ids.end(), "newmodel") != found.model_ids.end());

    CHECK_THROWS_AS(insert_model(next, card, reasoner), TreeError);
}

TEST_CASE("insert opens a new subject with a general style when nothing fits") {
    const auto reasoner = testkit::rule_reasoner();
    const auto tree = build_tree(testkit::fixture_catalog(), reasoner);
    auto card = make_card("brutal-blocks", {"architecture"}, {});
    card.example_prompts = {"brutalist architecture"};

    const auto next = insert_model(tree, card, reasoner);
    CHECK(next.subjects.size() == tree.subjects.size() + 1);
    CHECK(next.leaf_of("brutal-blocks") == std::make_pair(std::string("architecture"), std::string(kGeneralStyle)));

    const auto found = search_tree(next, card.example_prompts.front(), reasoner);
    CHECK(found.model_ids == std::vector<std::string>{"brutal-blocks"});
}

TEST_CASE("tree JSON round-trips and rejects broken documents") {
    const auto reasoner = testkit::rule_reasoner();
    const auto tree = build_tree(testkit::fixture_catalog(), reasoner);
    const nlohmann::json doc = tree;
    CHECK(doc.get<ModelTree>() == tree);

    testkit::TempDir dir;
    save_tree(tree, dir / "tree.json");
    CHECK(load_tree(dir / "tree.json") == tree);

    auto twice = doc;
    twice["subjects"][1]["styles"][0]["model_ids"].push_back("portrait-realism-xl");
    CHECK_THROWS_AS(twice.get<ModelTree>(), TreeError);

    auto hollow = doc;
    hollow["subjects"][0]["styles"] = nlohmann::json::array();
    CHECK_THROWS_AS(hollow.get<ModelTree>(), TreeError);

    CHECK_THROWS_AS(nlohmann::json::parse(R"({"subjects": []})").get<ModelTree>(), TreeError);
    CHECK_THROWS_AS(load_tree(dir / "absent.json"), TreeError);
}

TEST_CASE("search reaches every fixture leaf from its lexicon keywords") {
    const auto reasoner = testkit::rule_reasoner();
    const auto lex = testkit::fixture_lexicon();
    const auto tree = build_tree(testkit::fixture_catalog(), reasoner);
    for (const auto& subject : tree.subjects) {
        for (const auto& style : subject.styles) {
            const auto query = "a " + lex.keywords(subject.label).front() + ", " + lex.keywords(style.label).front();
            CAPTURE(query);
            const auto found = search_tree(tree, query, reasoner);
            CHECK(found.subject == subject.label);
            CHECK(found.style == style.label);
            CHECK(found.model_ids == style.model_ids);
            check_trace_replays(found, reasoner);
        }
    }
}

TEST_CASE("search examples and errors") {
    const auto reasoner = testkit::rule_reasoner();
    const auto tree = build_tree(testkit::fixture_catalog(), reasoner);
    CHECK(search_tree(tree, "a dog", reasoner).subject == "animals");
    CHECK(search_tree(tree, "a beach", reasoner).subject == "scenes");
    CHECK_THROWS_AS(search_tree(tree, "   ", reasoner), TreeError);
    CHECK_THROWS_AS(search_tree(ModelTree{}, "a dog", reasoner), TreeError);
}

TEST_CASE("beam search still lands on one real leaf and agrees with greedy on clear prompts") {
    const auto reasoner = testkit::rule_reasoner();
    const auto tree = build_tree(testkit::fixture_catalog(), reasoner);
    for (const auto* q : {"a dog photo", "anime girl", "a dog on a beach, anime", "zzz"}) {
        CAPTURE(q);
        const auto wide = search_tree(tree, q, reasoner, SearchOptions{2});
        const auto leaf = std::find_if(tree.subjects.begin(), tree.subjects.end(),
                                       [&](const SubjectNode& s) { return s.label == wide.subject; });
        REQUIRE(leaf != tree.subjects.end());
        const auto style = std::find_if(leaf->styles.begin(), leaf->styles.end(),
                                        [&](const StyleNode& s) { return s.label == wide.style; });
        REQUIRE(style != leaf->styles.end());
        CHECK(wide.model_ids == style->model_ids);
        check_trace_replays(wide, reasoner);
    }
    const auto greedy = search_tree(tree, "a dog photo", reasoner);
    const auto wide = search_tree(tree, "a dog photo", reasoner, SearchOptions{3});
    CHECK(wide.model_ids == greedy.model_ids);
}

TEST_CASE("reconcile inserts new cards and rebuilds on stale ids or drift") {
    const auto reasoner = testkit::rule_reasoner();
    const Catalog v1({make_card("a", {"people"}, {"anime"}), make_card("b", {"animals"}, {"photorealistic"})}, 1);
    const auto tree = build_tree(v1, reasoner);
    const auto v2 = add_model(v1, make_card("c", {"scenes"}, {}));

    const auto caught_up = reconcile_tree(tree, v2, reasoner);
    CHECK(caught_up.catalog_version == 2);
    CHECK(testkit::partition_problem(caught_up, v2).empty());

    const Catalog without_a({make_card("b", {"animals"}, {"photorealistic"})}, 2);
    CHECK(reconcile_tree(tree, without_a, reasoner) == build_tree(without_a, reasoner));

    const Catalog far({v2.cards().begin(), v2.cards().end()}, 9);
    CHECK(reconcile_tree(tree, far, reasoner, 3) == build_tree(far, reasoner));
}

TEST_CASE("build and insert keep the partition on random catalogs") {
    const auto reasoner = testkit::rule_reasoner();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        auto catalog = testkit::random_catalog(rng, std::uniform_int_distribution<int>(1, 30)(rng));
        auto tree = build_tree(catalog, reasoner);
        CAPTURE(trial);
        REQUIRE(testkit::partition_problem(tree, catalog).empty());
        for (int i = std::uniform_int_distribution<int>(0, 4)(rng); i > 0; --i) {
            const auto card = testkit::random_tree_card(rng, "new" + std::to_string(i));
            catalog = add_model(catalog, card);
            tree = insert_model(tree, card, reasoner);
            REQUIRE(testkit::partition_problem(tree, catalog).empty());
            REQUIRE(check_tree(tree).empty());
        }
        const auto found = search_tree(tree, testkit::pick(rng, testkit::subject_pool()), reasoner);
        CHECK_FALSE(found.model_ids.empty());
    }
}
