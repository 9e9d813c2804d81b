#pragma once

#include "promptrouter/advantage.hpp"
#include "promptrouter/catalog.hpp"
#include "promptrouter/config.hpp"
#include "promptrouter/embedder.hpp"
#include "promptrouter/generation.hpp"
#include "promptrouter/lexicon.hpp"
#include "promptrouter/model_tree.hpp"
#include "promptrouter/pipeline.hpp"
#include "promptrouter/reasoner.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

namespace promptrouter {

/// The (catalog, tree, DB) trio a request is served from. Never mutated
/// after publication.
struct Snapshot {
    Catalog catalog;
    ModelTree tree;
    AdvantageDB db;
    std::string fingerprint;
};

struct GenerateOutcome {
    RoutingDecision decision;
    GenerationResult result;
};

/// Owns the reasoner, embedder, generation backend and the current snapshot.
/// Readers grab the snapshot pointer once per request; admin calls build a
/// new snapshot behind the writer lock and publish it in one swap.
class Engine {
public:
    /// Loads everything named by `config`. Throws on any load failure.
    explicit Engine(ServiceConfig config);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    std::shared_ptr<const Snapshot> snapshot() const;

    RoutingDecision route(std::string_view prompt) const;
    GenerateOutcome generate(std::string_view prompt, const GenerationParams& params);

    /// Adds `card` to the catalog and inserts it into the tree. Returns the
    /// published snapshot. With `persist_models` set the catalog and tree
    /// files are rewritten too.
    std::shared_ptr<const Snapshot> add_model(ModelCard card);

    /// Re-reads catalog, tree and DB from disk. On failure the old snapshot
    /// stays live and the error propagates.
    std::shared_ptr<const Snapshot> reload();

    const ServiceConfig& config() const noexcept { return config_; }
    const Reasoner& reasoner() const noexcept { return *reasoner_; }
    const Lexicon& lexicon() const noexcept { return lexicon_; }
    GenerationParams default_params() const;

private:
    std::shared_ptr<const Snapshot> load_snapshot() const;
    void publish(std::shared_ptr<const Snapshot> next);

    ServiceConfig config_;
    Lexicon lexicon_;
    std::unique_ptr<Reasoner> reasoner_;
    std::unique_ptr<Embedder> embedder_;
    std::unique_ptr<GenerationBackend> backend_;
    std::unique_ptr<GenerationDispatcher> dispatcher_;

    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::mutex writer_mutex_;
};

std::unique_ptr<Reasoner> make_reasoner(const ServiceConfig& config, const Lexicon& lexicon);
std::unique_ptr<Embedder> make_embedder(const ServiceConfig& config);

/// Opens the configured DB (or returns an empty one when no path is set),
/// applies the configured k values, and checks it against `embedder`.
AdvantageDB load_advantage_db(const ServiceConfig& config, const Embedder& embedder);

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// The HTTP routes as a plain function, independent of any socket.
class ServiceApi {
public:
    explicit ServiceApi(Engine& engine) : engine_(engine) {}

    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

private:
    ApiResponse post_route(const nlohmann::json& body);
    ApiResponse post_generate(const nlohmann::json& body);
    ApiResponse get_models();
    ApiResponse get_tree();
    ApiResponse post_models(const nlohmann::json& body);
    ApiResponse post_reload();

    Engine& engine_;
};

nlohmann::json error_body(std::string_view stage, std::string_view message);

/// Multi-threaded HTTP front end over ServiceApi.
class HttpService {
public:
    explicit HttpService(Engine& engine);
    ~HttpService();

    /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
    /// Throws ConfigError when the address cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop(). bind() must have succeeded.
    void listen();
    /// bind() + listen() on a background thread.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace promptrouter
