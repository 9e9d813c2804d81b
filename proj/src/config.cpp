#include "promptrouter/config.hpp"

#include "promptrouter/errors.hpp"

#include <cstdlib>
#include <fstream>

namespace promptrouter {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
    if (value.empty()) return {};
    fs::path p(value);
    return (p.is_absolute() || base.empty()) ? p : base / p;
}

std::string_view name(ReasonerMode m) { return m == ReasonerMode::Remote ? "remote" : "rule_based"; }
std::string_view name(EmbedderMode m) { return m == EmbedderMode::Remote ? "remote" : "fallback"; }
std::string_view name(BackendMode m) { return m == BackendMode::Http ? "http" : "mock"; }

}  // namespace

std::optional<ReasonerMode> reasoner_mode_from_string(std::string_view s) {
    if (s == "rule_based") return ReasonerMode::RuleBased;
    if (s == "remote") return ReasonerMode::Remote;
    return std::nullopt;
}

std::optional<EmbedderMode> embedder_mode_from_string(std::string_view s) {
    if (s == "fallback") return EmbedderMode::Fallback;
    if (s == "remote") return EmbedderMode::Remote;
    return std::nullopt;
}

std::optional<BackendMode> backend_mode_from_string(std::string_view s) {
    if (s == "mock") return BackendMode::Mock;
    if (s == "http") return BackendMode::Http;
    return std::nullopt;
}

void ServiceConfig::validate() const {
    if (reasoner_mode == ReasonerMode::Remote && remote_base_url.empty()) {
        throw ConfigError("reasoner_mode 'remote' requires remote_base_url");
    }
    if (embedder_mode == EmbedderMode::Remote && (embedder_url.empty() || embedder_dimension == 0)) {
        throw ConfigError("embedder_mode 'remote' requires embedder_url and embedder_dimension");
    }
    if (k_prompts < 1 || k_models < 1) throw ConfigError("k_prompts and k_models must be at least 1");
    if (catalog_dir.empty()) throw ConfigError("catalog_dir is required");
    if (listen_addr.find(':') == std::string::npos) throw ConfigError("listen_addr must be host:port");
}

ServiceConfig config_from_json(const json& j, const fs::path& base_dir) {
    ServiceConfig c;
    try {
        const auto path_of = [&](const char* key, fs::path& field) {
            if (j.contains(key)) field = resolve(base_dir, j.at(key).get<std::string>());
            else if (!field.empty() && !base_dir.empty() && field.is_relative()) field = base_dir / field;
        };
        path_of("catalog_dir", c.catalog_dir);
        path_of("db_path", c.db_path);
        path_of("tree_path", c.tree_path);
        path_of("templates_dir", c.templates_dir);
        path_of("lexicon_path", c.lexicon_path);
        path_of("artifact_dir", c.artifact_dir);

        if (j.contains("reasoner_mode")) {
            const auto s = j.at("reasoner_mode").get<std::string>();
            if (!reasoner_mode_from_string(s)) throw ConfigError("unknown reasoner_mode '" + s + "'");
            c.reasoner_mode = *reasoner_mode_from_string(s);
        }
        if (j.contains("embedder_mode")) {
            const auto s = j.at("embedder_mode").get<std::string>();
            if (!embedder_mode_from_string(s)) throw ConfigError("unknown embedder_mode '" + s + "'");
            c.embedder_mode = *embedder_mode_from_string(s);
        }
        if (j.contains("backend")) {
            const auto s = j.at("backend").get<std::string>();
            if (!backend_mode_from_string(s)) throw ConfigError("unknown backend '" + s + "'");
            c.backend = *backend_mode_from_string(s);
        }
        c.remote_base_url = j.value("remote_base_url", c.remote_base_url);
        c.remote_model = j.value("remote_model", c.remote_model);
        c.remote_timeout_ms = j.value("remote_timeout_ms", c.remote_timeout_ms);
        c.embedder_url = j.value("embedder_url", c.embedder_url);
        c.embedder_model = j.value("embedder_model", c.embedder_model);
        c.embedder_dimension = j.value("embedder_dimension", c.embedder_dimension);
        c.listen_addr = j.value("listen_addr", c.listen_addr);
        c.k_prompts = j.value("k_prompts", c.k_prompts);
        c.k_models = j.value("k_models", c.k_models);
        c.max_examples = j.value("max_examples", c.max_examples);
        c.beam_width = j.value("beam_width", c.beam_width);
        c.tree_rebuild_drift = j.value("tree_rebuild_drift", c.tree_rebuild_drift);
        c.persist_models = j.value("persist_models", c.persist_models);
        c.generation_timeout_ms = j.value("generation_timeout_ms", c.generation_timeout_ms);
        c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
        c.max_queued = j.value("max_queued", c.max_queued);
        if (const auto g = j.find("generation"); g != j.end()) {
            c.width = g->value("width", c.width);
            c.height = g->value("height", c.height);
            c.steps = g->value("steps", c.steps);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

json config_to_json(const ServiceConfig& c) {
    return json{{"catalog_dir", c.catalog_dir.string()},
                {"db_path", c.db_path.string()},
                {"tree_path", c.tree_path.string()},
                {"templates_dir", c.templates_dir.string()},
                {"lexicon_path", c.lexicon_path.string()},
                {"artifact_dir", c.artifact_dir.string()},
                {"reasoner_mode", name(c.reasoner_mode)},
                {"remote_base_url", c.remote_base_url},
                {"remote_model", c.remote_model},
                {"remote_timeout_ms", c.remote_timeout_ms},
                {"embedder_mode", name(c.embedder_mode)},
                {"embedder_url", c.embedder_url},
                {"embedder_model", c.embedder_model},
                {"embedder_dimension", c.embedder_dimension},
                {"listen_addr", c.listen_addr},
                {"k_prompts", c.k_prompts},
                {"k_models", c.k_models},
                {"max_examples", c.max_examples},
                {"beam_width", c.beam_width},
                {"tree_rebuild_drift", c.tree_rebuild_drift},
                {"persist_models", c.persist_models},
                {"backend", name(c.backend)},
                {"generation_timeout_ms", c.generation_timeout_ms},
                {"max_in_flight", c.max_in_flight},
                {"max_queued", c.max_queued},
                {"generation", {{"width", c.width}, {"height", c.height}, {"steps", c.steps}}}};
}

ServiceConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

fs::path default_config_path() {
    if (const char* env = std::getenv("PROMPTROUTER_CONFIG"); env != nullptr && *env != '\0') return env;
    return "promptrouter.json";
}

}  // namespace promptrouter
