#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace promptrouter {

enum class ReasonerMode { RuleBased, Remote };
enum class EmbedderMode { Fallback, Remote };
enum class BackendMode { Mock, Http };

/// Service and CLI configuration, read from one JSON document. Relative
/// paths inside the document resolve against the document's directory.
struct ServiceConfig {
    std::filesystem::path catalog_dir = "fixtures/catalog";
    std::filesystem::path db_path;     // empty: route on the tree alone
    std::filesystem::path tree_path;   // empty: build the tree at startup
    std::filesystem::path templates_dir = "templates";
    std::filesystem::path lexicon_path = "fixtures/lexicon.json";
    std::filesystem::path artifact_dir = "artifacts";

    ReasonerMode reasoner_mode = ReasonerMode::RuleBased;
    std::string remote_base_url;
    std::string remote_model = "gpt-3.5-turbo";
    std::int64_t remote_timeout_ms = 30'000;

    EmbedderMode embedder_mode = EmbedderMode::Fallback;
    std::string embedder_url;
    std::string embedder_model;
    std::size_t embedder_dimension = 256;

    std::string listen_addr = "127.0.0.1:8080";
    std::size_t k_prompts = 5;
    std::size_t k_models = 5;
    std::size_t max_examples = 3;
    std::size_t beam_width = 1;
    /// Catalog versions a persisted tree may lag before it is rebuilt rather
    /// than patched by insertion. Negative: never rebuild automatically.
    std::int64_t tree_rebuild_drift = -1;
    /// POST /v1/models rewrites the catalog directory and tree file.
    bool persist_models = false;

    BackendMode backend = BackendMode::Mock;
    std::int64_t generation_timeout_ms = 120'000;
    std::size_t max_in_flight = 4;
    std::size_t max_queued = 16;
    int width = 512;
    int height = 512;
    int steps = 30;

    /// Throws ConfigError when remote modes lack URLs or k values are zero.
    void validate() const;
};

ServiceConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ServiceConfig& config);
ServiceConfig load_config(const std::filesystem::path& path);

/// `PROMPTROUTER_CONFIG` when set, otherwise `promptrouter.json`.
std::filesystem::path default_config_path();

std::optional<ReasonerMode> reasoner_mode_from_string(std::string_view s);
std::optional<EmbedderMode> embedder_mode_from_string(std::string_view s);
std::optional<BackendMode> backend_mode_from_string(std::string_view s);

}  // namespace promptrouter
