#include "promptrouter/errors.hpp"
#include "promptrouter/service.hpp"

#include "offline_guard.hpp"
#include "service_fixture.hpp"
#include "testkit.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <set>
#include <thread>

using namespace promptrouter;
using nlohmann::json;

namespace {

int leaves_holding(const json& tree, const std::string& id) {
    int n = 0;
    for (const auto& s : tree.at("subjects")) {
        for (const auto& st : s.at("styles")) {
            for (const auto& m : st.at("model_ids")) n += m == id ? 1 : 0;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("route endpoint returns the decision document") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto res = api.handle("POST", "/v1/route", R"({"prompt": "I want to see a beach"})");
    REQUIRE(res.status == 200);
    CHECK(res.body.at("parsed").at("core") == "a beach");
    CHECK(res.body.at("outcome").at("model_id") == "seaside-realism");
    CHECK(res.body.at("outcome").at("source") == "intersection");
    CHECK(res.body.at("config_fingerprint") == engine.snapshot()->fingerprint);
    CHECK(res.body.contains("timings_ms"));
}

TEST_CASE("request errors carry a stage and a status") {
    testkit::ServiceFixture fx(false);
    Engine engine(fx.config);
    ServiceApi api(engine);

    auto res = api.handle("POST", "/v1/route", R"({"prompt": "   "})");
    CHECK(res.status == 400);
    CHECK(res.body.at("error").at("stage") == "parser");
    CHECK_FALSE(res.body.at("error").at("message").get<std::string>().empty());

    CHECK(api.handle("POST", "/v1/route", "{not json").status == 400);
    CHECK(api.handle("POST", "/v1/route", R"({"text": "a dog"})").status == 400);
    CHECK(api.handle("POST", "/v1/route", R"([1, 2])").status == 400);
    CHECK(api.handle("GET", "/v1/route", "").status == 405);
    CHECK(api.handle("DELETE", "/v1/models", "").status == 405);
    res = api.handle("GET", "/v1/nothing", "");
    CHECK(res.status == 404);
    CHECK(res.body.at("error").at("stage") == "request");

    CHECK(api.handle("POST", "/v1/generate", R"({"prompt": "a dog", "width": 500})").status == 400);
    CHECK(api.handle("POST", "/v1/generate", R"({"prompt": "a dog", "seed": "x"})").status == 400);
}

TEST_CASE("generate endpoint routes and writes a mock artifact") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto res = api.handle("POST", "/v1/generate", R"({"prompt": "a dog", "seed": 7, "steps": 12})");
    REQUIRE(res.status == 200);
    const auto& gen = res.body.at("generation");
    CHECK(gen.at("model_id") == res.body.at("decision").at("outcome").at("model_id"));
    CHECK(gen.at("backend_id") == "mock");
    const auto artifact = json::parse(testkit::slurp(gen.at("artifact_path").get<std::string>()));
    CHECK(artifact.at("seed") == 7);
    CHECK(artifact.at("steps") == 12);
    CHECK(artifact.at("prompt") == res.body.at("decision").at("extended_prompt"));
}

TEST_CASE("generation without an endpoint maps to 422 on the http backend") {
    testkit::ServiceFixture fx(false);
    fx.config.backend = BackendMode::Http;
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto res = api.handle("POST", "/v1/generate", R"({"prompt": "a dog"})");
    CHECK(res.status == 422);
    CHECK(res.body.at("error").at("stage") == "generate");
}

TEST_CASE("models and tree endpoints describe the live snapshot") {
    testkit::ServiceFixture fx(false);
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto models = api.handle("GET", "/v1/models", "");
    REQUIRE(models.status == 200);
    CHECK(models.body.at("count") == 20);
    CHECK(models.body.at("catalog_version") == 1);
    for (const auto& m : models.body.at("models")) {
        CHECK(m.at("leaf").is_object());
        CHECK(m.contains("has_endpoint"));
    }
    const auto tree = api.handle("GET", "/v1/tree", "");
    REQUIRE(tree.status == 200);
    CHECK(tree.body == json(engine.snapshot()->tree));
}

TEST_CASE("adding a model puts it in exactly one leaf without touching older snapshots") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto before = engine.snapshot();

    const auto res = api.handle("POST", "/v1/models", testkit::new_card_json("knight-anime").dump());
    REQUIRE(res.status == 201);
    CHECK(res.body.at("model_id") == "knight-anime");
    CHECK(res.body.at("catalog_version") == 2);
    CHECK(res.body.at("leaf") == json{{"subject", "people"}, {"style", "anime"}});
    CHECK(res.body.at("config_fingerprint") != before->fingerprint);

    const auto tree = api.handle("GET", "/v1/tree", "");
    CHECK(leaves_holding(tree.body, "knight-anime") == 1);
    CHECK(tree.body.at("catalog_version") == 2);
    CHECK_FALSE(before->catalog.contains("knight-anime"));
    CHECK_FALSE(before->tree.contains("knight-anime"));

    CHECK(api.handle("POST", "/v1/models", testkit::new_card_json("knight-anime").dump()).status == 409);
    auto bad = testkit::new_card_json("bad");
    bad.erase("style_tags");
    CHECK(api.handle("POST", "/v1/models", bad.dump()).status == 400);
    auto tagless = testkit::new_card_json("tagless");
    tagless["subject_tags"] = json::array();
    tagless["style_tags"] = json::array();
    tagless["free_tags"] = json::array();
    CHECK(api.handle("POST", "/v1/models", tagless.dump()).status == 400);

    // Not persisted by default: a reload goes back to the files.
    const auto reloaded = api.handle("POST", "/v1/reload", "");
    REQUIRE(reloaded.status == 200);
    CHECK(reloaded.body.at("count") == 20);
    CHECK(reloaded.body.at("config_fingerprint") == before->fingerprint);
}

TEST_CASE("persisted models survive a reload") {
    testkit::ServiceFixture fx(false);
    fx.config.persist_models = true;
    fx.config.tree_path = fx.dir / "tree.json";
    Engine engine(fx.config);
    ServiceApi api(engine);
    REQUIRE(api.handle("POST", "/v1/models", testkit::new_card_json("kept").dump()).status == 201);
    CHECK(testkit::fs::exists(fx.dir / "catalog" / "kept.json"));
    CHECK(load_tree(fx.dir / "tree.json").contains("kept"));

    const auto reloaded = api.handle("POST", "/v1/reload", "");
    CHECK(reloaded.body.at("count") == 21);
    CHECK(engine.snapshot()->tree.contains("kept"));
}

TEST_CASE("a failed reload keeps the old snapshot live") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    ServiceApi api(engine);
    const auto before = engine.snapshot();
    std::ofstream(fx.dir / "db.json") << "{broken";
    const auto res = api.handle("POST", "/v1/reload", "");
    CHECK(res.status == 500);
    CHECK(res.body.at("error").at("stage") == "advantage");
    CHECK(engine.snapshot() == before);
}

TEST_CASE("engine rejects a DB built with another embedder") {
    testkit::ServiceFixture fx;
    fx.config.embedder_dimension = 64;
    CHECK_THROWS_AS(Engine(fx.config), AdvantageError);
}

TEST_CASE("every request sees one whole snapshot while admin calls run") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    std::mutex seen_mutex;
    std::set<std::string> published{engine.snapshot()->fingerprint};
    std::set<std::string> seen;
    std::atomic<bool> done{false};
    std::atomic<int> routed{0};

    std::vector<std::thread> readers;
    for (int t = 0; t < 4; ++t) {
        readers.emplace_back([&] {
            while (!done) {
                const auto d = engine.route("portrait of a knight, anime");
                std::lock_guard lock(seen_mutex);
                seen.insert(d.config_fingerprint);
                ++routed;
            }
        });
    }
    for (int i = 0; i < 5; ++i) {
        auto card = testkit::new_card_json("added-" + std::to_string(i)).get<ModelCard>();
        const auto snap = engine.add_model(card);
        {
            std::lock_guard lock(seen_mutex);
            published.insert(snap->fingerprint);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    engine.reload();
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    done = true;
    for (auto& t : readers) t.join();

    CHECK(routed > 0);
    for (const auto& fp : seen) {
        CAPTURE(fp);
        CHECK(published.count(fp) == 1);
    }
}

TEST_CASE("HTTP front end serves the six endpoints over loopback") {
    testkit::ServiceFixture fx;
    Engine engine(fx.config);
    offline_guard::LoopbackScope loopback;
    HttpService service(engine);
    const int port = service.start("127.0.0.1", 0);
    REQUIRE(port > 0);

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(10, 0);
    auto res = client.Post("/v1/route", R"({"prompt": "a dog"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body).at("parsed").at("prompt_type") == "PromptBased");

    res = client.Post("/v1/generate", R"({"prompt": "a dog"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = client.Get("/v1/models");
    REQUIRE(res);
    CHECK(json::parse(res->body).at("count") == 20);

    res = client.Post("/v1/models", testkit::new_card_json("over-http").dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);

    res = client.Get("/v1/tree");
    REQUIRE(res);
    CHECK(leaves_holding(json::parse(res->body), "over-http") == 1);

    res = client.Post("/v1/reload", "", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = client.Get("/missing");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(json::parse(res->body).at("error").at("stage") == "request");

    service.stop();
}

TEST_CASE("binding a bad address is a config error") {
    testkit::ServiceFixture fx(false);
    Engine engine(fx.config);
    offline_guard::LoopbackScope loopback;
    HttpService first(engine);
    const int port = first.bind("127.0.0.1", 0);
    HttpService second(engine);
    CHECK_THROWS_AS(second.bind("127.0.0.1", port), ConfigError);
}
