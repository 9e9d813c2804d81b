#include "promptrouter/cli.hpp"
#include "promptrouter/model_tree.hpp"

#include "testkit.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sstream>

using nlohmann::json;

namespace {

struct Run {
    int rc = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "promptrouter");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = promptrouter::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

std::vector<std::string> with_fixtures(std::vector<std::string> args,
                                       const testkit::fs::path& catalog = testkit::catalog_dir()) {
    args.insert(args.end(), {"--catalog", catalog.string(), "--templates", testkit::templates_dir().string(),
                             "--lexicon", testkit::lexicon_path().string()});
    return args;
}

}  // namespace

TEST_CASE("route prints the decision as JSON") {
    const auto r = cli(with_fixtures({"route", "a dog", "--no-timings"}));
    REQUIRE(r.rc == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("parsed").at("prompt_type") == "PromptBased");
    CHECK(j.at("parsed").at("core") == "a dog");
    CHECK(j.at("tree_path").at("subject") == "animals");
    CHECK_FALSE(j.contains("timings_ms"));
    CHECK(cli(with_fixtures({"route", "a dog", "--no-timings"})).out == r.out);
    CHECK(json::parse(cli(with_fixtures({"route", "a dog"})).out).contains("timings_ms"));
}

TEST_CASE("usage errors exit 1, runtime errors exit 2, help exits 0") {
    auto r = cli({"frobnicate"});
    CHECK(r.rc == 1);
    CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
    CHECK(cli({"route"}).rc == 1);
    CHECK(cli({}).rc == 1);
    CHECK(cli({"--help"}).rc == 0);
    CHECK(cli({"route", "--help"}).rc == 0);

    r = cli(with_fixtures({"route", "a dog"}, "/nonexistent/catalog"));
    CHECK(r.rc == 2);
    CHECK(r.err.rfind("error [catalog]", 0) == 0);

    r = cli(with_fixtures({"route", "   "}));
    CHECK(r.rc == 2);
    CHECK(r.err.rfind("error [parser]", 0) == 0);
}

TEST_CASE("build-advantage-db then route fills the model grid") {
    testkit::TempDir dir;
    const auto db = (dir / "out" / "db.json").string();
    auto r = cli(with_fixtures({"build-advantage-db", "--corpus", (testkit::fixtures_dir() / "corpus.txt").string(),
                                "--scorer", "synthetic", "--out", db, "--k-prompts", "4"}));
    REQUIRE(r.rc == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary.at("prompts") == 200);
    CHECK(summary.at("models") == 20);
    CHECK(json::parse(testkit::slurp(db)).at("k_prompts") == 4);

    r = cli(with_fixtures({"route", "I want to see a beach", "--db", db, "--no-timings"}));
    REQUIRE(r.rc == 0);
    const auto j = json::parse(r.out);
    // The configured k (default 5) wins over the value stored in the DB.
    CHECK(j.at("grid").at("rows").size() == 5);
    CHECK(j.at("outcome").at("model_id") == "seaside-realism");

    CHECK(cli(with_fixtures({"build-advantage-db", "--corpus", "x", "--scorer", "magic", "--out", db})).rc == 1);
}

TEST_CASE("build-tree writes a loadable tree") {
    testkit::TempDir dir;
    const auto r = cli(with_fixtures({"build-tree", "--out", (dir / "tree.json").string()}));
    REQUIRE(r.rc == 0);
    const auto tree = promptrouter::load_tree(dir / "tree.json");
    CHECK(tree.model_ids().size() == 20);
    CHECK(json::parse(cli(with_fixtures({"build-tree"})).out) == json(tree));
}

TEST_CASE("add-model updates a catalog directory and its tree") {
    testkit::TempDir dir;
    testkit::fs::copy(testkit::catalog_dir(), dir / "catalog", testkit::fs::copy_options::recursive);
    std::ofstream(dir / "card.json") << json{{"id", "ink-knights"},
                                             {"name", "Ink Knights"},
                                             {"subject_tags", {"people"}},
                                             {"style_tags", {"anime"}},
                                             {"free_tags", json::array()},
                                             {"example_prompts", {"a knight, lineart"}},
                                             {"base_model", "sd15"},
                                             {"endpoint", nullptr}}
                                            .dump();
    const auto tree_path = (dir / "tree.json").string();
    auto r = cli(with_fixtures({"add-model", (dir / "card.json").string(), "--tree", tree_path}, dir / "catalog"));
    REQUIRE(r.rc == 0);
    const auto report = json::parse(r.out);
    CHECK(report.at("catalog_version") == 2);
    CHECK(report.at("leaf") == json{{"subject", "people"}, {"style", "anime"}});
    CHECK(testkit::fs::exists(dir / "catalog" / "ink-knights.json"));
    CHECK(promptrouter::load_tree(tree_path).contains("ink-knights"));

    r = cli(with_fixtures({"route", "a knight, lineart", "--tree", tree_path, "--no-timings"}, dir / "catalog"));
    REQUIRE(r.rc == 0);
    const auto candidates = json::parse(r.out).at("tree_candidates");
    CHECK(std::find(candidates.begin(), candidates.end(), "ink-knights") != candidates.end());

    r = cli(with_fixtures({"add-model", (dir / "card.json").string()}, dir / "catalog"));
    CHECK(r.rc == 2);
    CHECK(r.err.find("ink-knights") != std::string::npos);
}

TEST_CASE("generate writes a mock artifact") {
    testkit::TempDir dir;
    const auto r = cli(with_fixtures({"generate", "a dog", "--seed", "9", "--artifact-dir", (dir / "art").string()}));
    REQUIRE(r.rc == 0);
    const auto j = json::parse(r.out);
    const auto path = j.at("generation").at("artifact_path").get<std::string>();
    CHECK(testkit::fs::exists(path));
    CHECK(json::parse(testkit::slurp(path)).at("seed") == 9);
    CHECK(cli(with_fixtures({"generate", "a dog", "--width", "100", "--artifact-dir", (dir / "art").string()})).rc == 2);
}

TEST_CASE("config files resolve relative paths and can come from the environment") {
    testkit::TempDir dir;
    testkit::fs::copy(testkit::catalog_dir(), dir / "cards", testkit::fs::copy_options::recursive);
    std::ofstream(dir / "router.json") << json{{"catalog_dir", "cards"},
                                               {"templates_dir", testkit::templates_dir().string()},
                                               {"lexicon_path", testkit::lexicon_path().string()},
                                               {"k_prompts", 3}}
                                              .dump();
    auto r = cli({"route", "a dog", "--config", (dir / "router.json").string()});
    REQUIRE(r.rc == 0);
    CHECK(json::parse(r.out).at("outcome").at("source") == "tree_fallback");

    ::setenv("PROMPTROUTER_CONFIG", (dir / "router.json").c_str(), 1);
    r = cli({"route", "a dog"});
    ::unsetenv("PROMPTROUTER_CONFIG");
    CHECK(r.rc == 0);

    std::ofstream(dir / "bad.json") << R"({"reasoner_mode": "psychic"})";
    r = cli({"route", "a dog", "--config", (dir / "bad.json").string()});
    CHECK(r.rc == 2);
    CHECK(r.err.rfind("error [config]", 0) == 0);
}
