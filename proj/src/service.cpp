#include "promptrouter/service.hpp"

#include "promptrouter/errors.hpp"

#include <httplib.h>

#include <limits>

namespace promptrouter {

using nlohmann::json;
namespace fs = std::filesystem;

std::unique_ptr<Reasoner> make_reasoner(const ServiceConfig& config, const Lexicon& lexicon) {
    auto templates = TemplateSet::load_dir(config.templates_dir);
    if (config.reasoner_mode == ReasonerMode::Remote) {
        RemoteReasonerOptions options;
        options.base_url = config.remote_base_url;
        options.model = config.remote_model;
        options.timeout = std::chrono::milliseconds(config.remote_timeout_ms);
        return std::make_unique<RemoteReasoner>(std::move(templates), std::move(options));
    }
    return std::make_unique<RuleBasedReasoner>(std::move(templates), lexicon);
}

std::unique_ptr<Embedder> make_embedder(const ServiceConfig& config) {
    if (config.embedder_mode == EmbedderMode::Remote) {
        return std::make_unique<RemoteEmbedder>(
            RemoteEmbedderOptions{config.embedder_url, config.embedder_model, config.embedder_dimension});
    }
    return std::make_unique<HashingEmbedder>(config.embedder_dimension);
}

AdvantageDB load_advantage_db(const ServiceConfig& config, const Embedder& embedder) {
    if (config.db_path.empty()) return {};
    const auto db = AdvantageDB::load(config.db_path);
    if (db.embedder_id() != embedder.id() || db.dimension() != embedder.dimension()) {
        throw AdvantageError("advantage DB was built with embedder '" + db.embedder_id() + "' (d=" +
                             std::to_string(db.dimension()) + ") but the service uses '" + embedder.id() + "' (d=" +
                             std::to_string(embedder.dimension()) + ")");
    }
    return db.with_k(config.k_prompts, config.k_models);
}

Engine::Engine(ServiceConfig config) : config_(std::move(config)) {
    config_.validate();
    lexicon_ = Lexicon::load(config_.lexicon_path);
    reasoner_ = make_reasoner(config_, lexicon_);
    embedder_ = make_embedder(config_);
    if (config_.backend == BackendMode::Http) {
        backend_ = std::make_unique<HttpBackend>(std::chrono::milliseconds(config_.generation_timeout_ms));
    } else {
        backend_ = std::make_unique<MockBackend>(config_.artifact_dir);
    }
    dispatcher_ = std::make_unique<GenerationDispatcher>(*backend_, config_.max_in_flight, config_.max_queued);
    snapshot_ = load_snapshot();
}

Engine::~Engine() = default;

std::shared_ptr<const Snapshot> Engine::load_snapshot() const {
    auto next = std::make_shared<Snapshot>();
    next->catalog = load_catalog(config_.catalog_dir);
    if (!config_.tree_path.empty() && fs::exists(config_.tree_path)) {
        const auto drift = config_.tree_rebuild_drift < 0 ? std::numeric_limits<std::int64_t>::max()
                                                          : config_.tree_rebuild_drift;
        next->tree = reconcile_tree(load_tree(config_.tree_path), next->catalog, *reasoner_, drift);
    } else {
        next->tree = build_tree(next->catalog, *reasoner_);
    }
    next->db = load_advantage_db(config_, *embedder_);
    next->fingerprint = config_fingerprint(next->catalog, next->tree, next->db, reasoner_->templates());
    return next;
}

std::shared_ptr<const Snapshot> Engine::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

void Engine::publish(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = std::move(next);
}

GenerationParams Engine::default_params() const {
    return GenerationParams{config_.width, config_.height, config_.steps, 0};
}

namespace {

RoutingDecision route_on(const Snapshot& snap, std::string_view prompt, const Engine& engine,
                         const Embedder& embedder) {
    const RoutingContext ctx{snap.catalog, snap.tree, snap.db, engine.lexicon(), engine.reasoner(), embedder};
    const RouteOptions options{engine.config().max_examples, SearchOptions{engine.config().beam_width}};
    return route(prompt, ctx, options);
}

}  // namespace

RoutingDecision Engine::route(std::string_view prompt) const {
    const auto snap = snapshot();
    return route_on(*snap, prompt, *this, *embedder_);
}

GenerateOutcome Engine::generate(std::string_view prompt, const GenerationParams& params) {
    const auto snap = snapshot();
    auto decision = route_on(*snap, prompt, *this, *embedder_);
    auto result = promptrouter::generate(decision, snap->catalog, params, *dispatcher_);
    return {std::move(decision), std::move(result)};
}

std::shared_ptr<const Snapshot> Engine::add_model(ModelCard card) {
    std::lock_guard writer(writer_mutex_);
    const auto current = snapshot();
    auto next = std::make_shared<Snapshot>();
    next->catalog = promptrouter::add_model(current->catalog, card);
    next->tree = insert_model(current->tree, card, *reasoner_);
    next->db = current->db;
    next->fingerprint = config_fingerprint(next->catalog, next->tree, next->db, reasoner_->templates());
    if (config_.persist_models) {
        if (fs::is_directory(config_.catalog_dir)) save_catalog(next->catalog, config_.catalog_dir);
        if (!config_.tree_path.empty()) save_tree(next->tree, config_.tree_path);
    }
    publish(next);
    return next;
}

std::shared_ptr<const Snapshot> Engine::reload() {
    std::lock_guard writer(writer_mutex_);
    auto next = load_snapshot();
    publish(next);
    return next;
}

json error_body(std::string_view stage, std::string_view message) {
    return json{{"error", {{"stage", stage}, {"message", message}}}};
}

namespace {

class BadRequest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ApiResponse fail(int status, std::string_view stage, std::string_view message) {
    return {status, error_body(stage, message)};
}

int status_of(const GenerationError& e) {
    switch (e.kind()) {
        case GenerationError::Kind::InvalidRequest: return 400;
        case GenerationError::Kind::MissingEndpoint: return 422;
        case GenerationError::Kind::Busy: return 503;
        case GenerationError::Kind::Timeout: return 504;
        case GenerationError::Kind::BadStatus:
        case GenerationError::Kind::Transport: return 502;
    }
    return 500;
}

// Maps the exception currently being handled onto the error envelope.
ApiResponse current_error() {
    try {
        throw;
    } catch (const BadRequest& e) {
        return fail(400, "request", e.what());
    } catch (const RoutingError& e) {
        if (e.client_error()) return fail(400, e.stage(), e.what());
        return fail(e.stage() == "snapshot" ? 409 : 500, e.stage(), e.what());
    } catch (const GenerationError& e) {
        return fail(status_of(e), e.stage(), e.what());
    } catch (const CatalogError& e) {
        return fail(400, e.stage(), e.what());
    } catch (const Error& e) {
        return fail(500, e.stage(), e.what());
    } catch (const std::exception& e) {
        return fail(500, "internal", e.what());
    }
}

std::string required_prompt(const json& body) {
    const auto it = body.find("prompt");
    if (it == body.end() || !it->is_string()) throw BadRequest("body must carry a string field 'prompt'");
    return it->get<std::string>();
}

int optional_int(const json& body, const char* key, int fallback) {
    const auto it = body.find(key);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_number_integer()) throw BadRequest(std::string("field '") + key + "' must be an integer");
    const auto v = it->get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw BadRequest(std::string("field '") + key + "' is out of range");
    }
    return static_cast<int>(v);
}

json leaf_json(const ModelTree& tree, std::string_view id) {
    const auto leaf = tree.leaf_of(id);
    if (!leaf) return nullptr;
    return json{{"subject", leaf->first}, {"style", leaf->second}};
}

}  // namespace

ApiResponse ServiceApi::handle(std::string_view method, std::string_view path, std::string_view body) {
    struct Route {
        std::string_view path;
        std::string_view method;
    };
    static constexpr Route kRoutes[] = {{"/v1/route", "POST"},  {"/v1/generate", "POST"}, {"/v1/models", "GET"},
                                        {"/v1/tree", "GET"},    {"/v1/models", "POST"},   {"/v1/reload", "POST"}};
    bool known_path = false;
    for (const auto& r : kRoutes) known_path = known_path || r.path == path;
    if (!known_path) return fail(404, "request", "no such endpoint: " + std::string(path));

    try {
        json parsed = json::object();
        if (method == "POST" && !body.empty()) {
            parsed = json::parse(body, nullptr, false);
            if (parsed.is_discarded()) throw BadRequest("request body is not valid JSON");
            if (!parsed.is_object()) throw BadRequest("request body must be a JSON object");
        }
        if (method == "POST" && path == "/v1/route") return post_route(parsed);
        if (method == "POST" && path == "/v1/generate") return post_generate(parsed);
        if (method == "GET" && path == "/v1/models") return get_models();
        if (method == "GET" && path == "/v1/tree") return get_tree();
        if (method == "POST" && path == "/v1/models") return post_models(parsed);
        if (method == "POST" && path == "/v1/reload") return post_reload();
    } catch (...) {
        return current_error();
    }
    return fail(405, "request", std::string(method) + " is not allowed on " + std::string(path));
}

ApiResponse ServiceApi::post_route(const json& body) {
    return {200, to_json(engine_.route(required_prompt(body)))};
}

ApiResponse ServiceApi::post_generate(const json& body) {
    const auto prompt = required_prompt(body);
    auto params = engine_.default_params();
    params.width = optional_int(body, "width", params.width);
    params.height = optional_int(body, "height", params.height);
    params.steps = optional_int(body, "steps", params.steps);
    params.seed = optional_int(body, "seed", static_cast<int>(params.seed));
    const auto outcome = engine_.generate(prompt, params);
    return {200, json{{"decision", to_json(outcome.decision)}, {"generation", outcome.result}}};
}

ApiResponse ServiceApi::get_models() {
    const auto snap = engine_.snapshot();
    json models = json::array();
    for (const auto& card : snap->catalog.cards()) {
        models.push_back({{"id", card.id},
                          {"name", card.name},
                          {"base_model", card.base_model},
                          {"subject_tags", card.subject_tags},
                          {"style_tags", card.style_tags},
                          {"popularity", card.popularity},
                          {"has_endpoint", card.endpoint.has_value()},
                          {"leaf", leaf_json(snap->tree, card.id)}});
    }
    return {200, json{{"catalog_version", snap->catalog.version()},
                      {"config_fingerprint", snap->fingerprint},
                      {"count", snap->catalog.size()},
                      {"models", std::move(models)}}};
}

ApiResponse ServiceApi::get_tree() { return {200, json(engine_.snapshot()->tree)}; }

ApiResponse ServiceApi::post_models(const json& body) {
    ModelCard card;
    try {
        card = body.get<ModelCard>();
    } catch (const json::exception& e) {
        throw BadRequest(std::string("malformed model card: ") + e.what());
    }
    if (engine_.snapshot()->catalog.contains(card.id)) {
        return fail(409, "catalog", "model '" + card.id + "' is already in the catalog");
    }
    const auto snap = engine_.add_model(card);
    return {201, json{{"model_id", card.id},
                      {"catalog_version", snap->catalog.version()},
                      {"leaf", leaf_json(snap->tree, card.id)},
                      {"config_fingerprint", snap->fingerprint}}};
}

ApiResponse ServiceApi::post_reload() {
    const auto snap = engine_.reload();
    return {200, json{{"catalog_version", snap->catalog.version()},
                      {"count", snap->catalog.size()},
                      {"config_fingerprint", snap->fingerprint}}};
}

struct HttpService::Impl {
    explicit Impl(Engine& engine) : api(engine) {}

    ServiceApi api;
    httplib::Server server;
    std::thread thread;
    bool bound = false;
};

HttpService::HttpService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const auto out = impl_->api.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    auto& server = impl_->server;
    // httplib also sets SO_REUSEPORT, which would let a second server share
    // a port that is already taken.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        res.status = 500;
        res.set_content(error_body("internal", "unhandled server error").dump(), "application/json");
    });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
    auto& server = impl_->server;
    int bound_port = port;
    if (port == 0) {
        bound_port = server.bind_to_any_port(host);
        if (bound_port <= 0) throw ConfigError("cannot bind " + host + ":0");
    } else if (!server.bind_to_port(host, port)) {
        throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return bound_port;
}

void HttpService::listen() {
    if (!impl_->bound) throw ConfigError("listen() called before bind()");
    impl_->server.listen_after_bind();
}

int HttpService::start(const std::string& host, int port) {
    const int bound_port = bind(host, port);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound_port;
}

void HttpService::stop() {
    if (!impl_) return;
    if (impl_->bound) impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
    impl_->bound = false;
}

}  // namespace promptrouter
