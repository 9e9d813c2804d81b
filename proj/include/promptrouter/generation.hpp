#pragma once

#include "promptrouter/catalog.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace promptrouter {

struct GenerationParams {
    int width = 512;
    int height = 512;
    int steps = 30;
    std::int64_t seed = 0;
};

struct GenerationRequest {
    std::string prompt;
    int width = 512;
    int height = 512;
    int steps = 30;
    std::int64_t seed = 0;
    std::string model_id;

    /// Throws GenerationError(InvalidRequest): sides must be multiples of 8 in
    /// [64, 4096], steps >= 1, seed >= 0, prompt non-empty.
    void validate() const;
};

struct GenerationResult {
    std::string model_id;
    std::optional<std::string> image_b64;
    std::optional<std::string> artifact_path;
    double latency_ms = 0.0;
    std::string backend_id;
};

void to_json(nlohmann::json& j, const GenerationResult& result);

class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual GenerationResult generate(const GenerationRequest& request, const ModelCard& card) = 0;
    virtual std::string id() const = 0;
};

/// Writes a JSON stub artifact echoing the request instead of an image. The
/// file name and contents depend only on the request.
class MockBackend final : public GenerationBackend {
public:
    explicit MockBackend(std::filesystem::path out_dir);

    GenerationResult generate(const GenerationRequest& request, const ModelCard& card) override;
    std::string id() const override { return "mock"; }

private:
    std::filesystem::path out_dir_;
};

/// Generic txt2img REST worker at `card.endpoint`:
/// POST {"prompt", "width", "height", "steps", "seed"} -> {"image_b64"} or {"artifact_path"}.
class HttpBackend final : public GenerationBackend {
public:
    explicit HttpBackend(std::chrono::milliseconds timeout = std::chrono::seconds(120));

    GenerationResult generate(const GenerationRequest& request, const ModelCard& card) override;
    std::string id() const override { return "http"; }

private:
    std::chrono::milliseconds timeout_;
};

/// Caps concurrent backend calls. Up to `max_in_flight` run at once, up to
/// `max_queued` more wait; anything beyond that is rejected with
/// GenerationError(Busy) instead of queuing.
class GenerationDispatcher {
public:
    explicit GenerationDispatcher(GenerationBackend& backend, std::size_t max_in_flight = 4,
                                  std::size_t max_queued = 16);

    GenerationResult dispatch(const GenerationRequest& request, const ModelCard& card);

    std::size_t in_flight() const;
    GenerationBackend& backend() noexcept { return backend_; }

private:
    GenerationBackend& backend_;
    std::size_t max_in_flight_;
    std::size_t max_queued_;
    mutable std::mutex mutex_;
    std::condition_variable slot_freed_;
    std::size_t in_flight_ = 0;
    std::size_t queued_ = 0;
};

}  // namespace promptrouter
