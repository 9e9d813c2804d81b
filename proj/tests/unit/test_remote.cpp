#include "promptrouter/embedder.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/http.hpp"
#include "promptrouter/reasoner.hpp"
#include "promptrouter/scorers.hpp"

#include "fake_server.hpp"
#include "testkit.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>

using namespace promptrouter;
using nlohmann::json;

namespace {

json chat_reply(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
}

ReasonerError::Kind reasoner_kind(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ReasonerError& e) {
        return e.kind();
    }
    FAIL("expected a ReasonerError");
    return ReasonerError::Kind::Transport;
}

}  // namespace

TEST_CASE("parse_url splits origin and path") {
    const auto u = http::parse_url("http://127.0.0.1:8000/v1/x");
    CHECK(u.origin == "http://127.0.0.1:8000");
    CHECK(u.path == "/v1/x");
    CHECK(http::parse_url("http://localhost").path == "/");
    CHECK_THROWS_AS(http::parse_url("ftp://host/x"), std::invalid_argument);
    CHECK_THROWS_AS(http::parse_url("not a url"), std::invalid_argument);
}

TEST_CASE("remote reasoner sends one chat message and reads the answer") {
    testkit::FakeServer fake;
    json request;
    std::string auth;
    fake.server.Post("/v1/chat/completions", [&](const httplib::Request& r, httplib::Response& res) {
        request = json::parse(r.body);
        auth = r.get_header_value("Authorization");
        res.set_content(chat_reply("thinking\nANSWER: scenes").dump(), "application/json");
    });
    fake.start();

    RemoteReasoner reasoner(testkit::fixture_templates(), {fake.base_url(), "tiny-model", "secret", std::chrono::seconds(5)});
    const std::vector<std::string> labels{"people", "scenes"};
    CHECK(reasoner.choose_label(labels, "a beach") == "scenes");
    CHECK(request.at("model") == "tiny-model");
    CHECK(request.at("temperature") == 0);
    REQUIRE(request.at("messages").size() == 1);
    CHECK(request["messages"][0]["role"] == "user");
    const auto content = request["messages"][0]["content"].get<std::string>();
    CHECK(content.find("a beach") != std::string::npos);
    CHECK(content.find("people|scenes") != std::string::npos);
    CHECK(auth == "Bearer secret");
    CHECK_FALSE(reasoner.deterministic());
}

TEST_CASE("remote reasoner retries one server error and re-asks one unparseable answer") {
    testkit::FakeServer fake;
    std::atomic<int> calls{0};
    fake.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        const int n = ++calls;
        if (n == 1) {
            res.status = 503;
            return;
        }
        res.set_content(chat_reply(n == 2 ? "no marker here" : "ANSWER: people").dump(), "application/json");
    });
    fake.start();

    RemoteReasoner reasoner(testkit::fixture_templates(), {fake.base_url() + "/v1", "m", "", std::chrono::seconds(5)});
    const auto a = reasoner.ask(templates::kTreeMatch, {{"categories", "people|scenes"}, {"prompt", "a woman"}});
    CHECK(std::get<Label>(a.parsed).value == "people");
    CHECK(calls == 3);
}

TEST_CASE("remote reasoner gives up after repeated failures") {
    testkit::FakeServer fake;
    std::atomic<int> calls{0};
    fake.server.Post("/v1/chat/completions", [&](const httplib::Request& r, httplib::Response& res) {
        ++calls;
        if (json::parse(r.body)["messages"][0]["content"].get<std::string>().find("garbled") != std::string::npos) {
            res.set_content(chat_reply("still no marker").dump(), "application/json");
        } else {
            res.status = 500;
        }
    });
    fake.start();
    RemoteReasoner reasoner(testkit::fixture_templates(), {fake.base_url(), "m", "", std::chrono::seconds(5)});

    CHECK(reasoner_kind([&] { reasoner.ask(templates::kTreeMatch, {{"categories", "a|b"}, {"prompt", "x"}}); }) ==
          ReasonerError::Kind::Transport);
    CHECK(calls == 2);

    calls = 0;
    CHECK(reasoner_kind([&] { reasoner.ask(templates::kTreeMatch, {{"categories", "a|b"}, {"prompt", "garbled"}}); }) ==
          ReasonerError::Kind::Unparseable);
    CHECK(calls == 2);
}

TEST_CASE("remote embedder normalizes vectors and checks their length") {
    testkit::FakeServer fake;
    json request;
    fake.server.Post("/v1/embeddings", [&](const httplib::Request& r, httplib::Response& res) {
        request = json::parse(r.body);
        const auto input = request.at("input").get<std::string>();
        const json vec = input == "short" ? json::array({1.0, 2.0}) : json::array({3.0, 0.0, 4.0});
        res.set_content(json{{"data", json::array({{{"embedding", vec}, {"index", 0}}})}}.dump(), "application/json");
    });
    fake.start();

    RemoteEmbedder embedder({fake.base_url(), "embed-small", 3, std::chrono::seconds(5)});
    const auto v = embedder.embed("a dog");
    CHECK(request.at("model") == "embed-small");
    CHECK(request.at("input") == "a dog");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[2] == doctest::Approx(0.8));
    CHECK(embedder.id() != HashingEmbedder(3).id());
    CHECK_THROWS_AS(embedder.embed("short"), AdvantageError);
    CHECK_THROWS_AS(embedder.embed(" "), AdvantageError);
}

TEST_CASE("remote scorer posts model and prompt and reads the score") {
    testkit::FakeServer fake;
    fake.server.Post("/score", [&](const httplib::Request& r, httplib::Response& res) {
        const auto j = json::parse(r.body);
        if (j.at("model_id") == "broken") {
            res.status = 500;
            return;
        }
        res.set_content(json{{"score", j.at("prompt").get<std::string>().size() / 10.0}}.dump(), "application/json");
    });
    fake.start();

    RemoteScorer scorer(fake.base_url() + "/score", std::chrono::seconds(5));
    CHECK(scorer.score(testkit::make_card("m", {"people"}, {}), "0123456789") == 1.0);
    CHECK_THROWS_AS(scorer.score(testkit::make_card("broken", {"people"}, {}), "x"), AdvantageError);
    CHECK_THROWS_AS(RemoteScorer("not-a-url"), std::invalid_argument);
}

TEST_CASE("client pool reuses connections across concurrent callers") {
    testkit::FakeServer fake;
    fake.server.Post("/echo", [](const httplib::Request& r, httplib::Response& res) {
        res.set_content(r.body, "application/json");
    });
    fake.start();

    http::ClientPool pool(fake.base_url(), std::chrono::seconds(5));
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 10; ++i) {
                const auto body = json{{"t", t}, {"i", i}}.dump();
                const auto res = pool.post_json("/echo", body);
                if (res.status == 200 && res.body == body) ++ok;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 40);
}
