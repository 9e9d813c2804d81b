#include "promptrouter/generation.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/http.hpp"
#include "promptrouter/text.hpp"

#include <fstream>

namespace promptrouter {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool valid_side(int px) { return px >= 64 && px <= 4096 && px % 8 == 0; }

}  // namespace

void GenerationRequest::validate() const {
    const auto reject = [&](const std::string& why) {
        throw GenerationError(GenerationError::Kind::InvalidRequest, why, model_id);
    };
    if (text::trim(prompt).empty()) reject("generation prompt is empty");
    if (!valid_side(width) || !valid_side(height)) {
        reject("width and height must be multiples of 8 in [64, 4096]");
    }
    if (steps < 1) reject("steps must be at least 1");
    if (seed < 0) reject("seed must be non-negative");
}

void to_json(json& j, const GenerationResult& result) {
    j = json{{"model_id", result.model_id},
             {"image_b64", result.image_b64 ? json(*result.image_b64) : json(nullptr)},
             {"artifact_path", result.artifact_path ? json(*result.artifact_path) : json(nullptr)},
             {"latency_ms", result.latency_ms},
             {"backend_id", result.backend_id}};
}

MockBackend::MockBackend(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {}

GenerationResult MockBackend::generate(const GenerationRequest& request, const ModelCard& card) {
    const auto started = Clock::now();
    const json artifact{{"backend", "mock"},       {"model_id", card.id},         {"prompt", request.prompt},
                        {"seed", request.seed},     {"width", request.width},      {"height", request.height},
                        {"steps", request.steps}};
    const std::string body = artifact.dump(2) + "\n";
    std::filesystem::create_directories(out_dir_);
    const auto path = out_dir_ / ("mock-" + codec::sha256_hex(body).substr(0, 16) + ".json");
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw GenerationError(GenerationError::Kind::Transport, "cannot write mock artifact " + path.string(),
                                  card.id);
        }
        out << body;
    }
    return GenerationResult{card.id, std::nullopt, path.string(), elapsed_ms(started), id()};
}

HttpBackend::HttpBackend(std::chrono::milliseconds timeout) : timeout_(timeout) {}

GenerationResult HttpBackend::generate(const GenerationRequest& request, const ModelCard& card) {
    if (!card.endpoint || card.endpoint->empty()) {
        throw GenerationError(GenerationError::Kind::MissingEndpoint,
                              "model '" + card.id + "' has no generation endpoint", card.id);
    }
    const json body{{"prompt", request.prompt},
                    {"width", request.width},
                    {"height", request.height},
                    {"steps", request.steps},
                    {"seed", request.seed}};
    const auto started = Clock::now();
    http::Response res;
    try {
        res = http::post_json(*card.endpoint, body.dump(), timeout_);
    } catch (const http::TransportError& e) {
        if (e.timed_out()) {
            throw GenerationError(GenerationError::Kind::Timeout,
                                  "generation backend for model '" + card.id + "' timed out", card.id);
        }
        throw GenerationError(GenerationError::Kind::Transport,
                              "generation backend for model '" + card.id + "' failed: " + e.what(), card.id);
    } catch (const std::invalid_argument& e) {
        throw GenerationError(GenerationError::Kind::MissingEndpoint,
                              "model '" + card.id + "' has an unusable endpoint: " + e.what(), card.id);
    }
    if (res.status < 200 || res.status >= 300) {
        throw GenerationError(GenerationError::Kind::BadStatus,
                              "generation backend for model '" + card.id + "' returned status " +
                                  std::to_string(res.status),
                              card.id);
    }

    GenerationResult out{card.id, std::nullopt, std::nullopt, elapsed_ms(started), id()};
    try {
        const auto j = json::parse(res.body);
        if (j.contains("image_b64")) out.image_b64 = j.at("image_b64").get<std::string>();
        if (j.contains("artifact_path")) out.artifact_path = j.at("artifact_path").get<std::string>();
    } catch (const json::exception& e) {
        throw GenerationError(GenerationError::Kind::BadStatus,
                              "generation backend for model '" + card.id + "' sent malformed JSON: " + e.what(),
                              card.id);
    }
    if (!out.image_b64 && !out.artifact_path) {
        throw GenerationError(GenerationError::Kind::BadStatus,
                              "generation backend for model '" + card.id + "' returned neither image nor artifact",
                              card.id);
    }
    return out;
}

GenerationDispatcher::GenerationDispatcher(GenerationBackend& backend, std::size_t max_in_flight,
                                           std::size_t max_queued)
    : backend_(backend), max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight), max_queued_(max_queued) {}

std::size_t GenerationDispatcher::in_flight() const {
    std::lock_guard lock(mutex_);
    return in_flight_;
}

GenerationResult GenerationDispatcher::dispatch(const GenerationRequest& request, const ModelCard& card) {
    request.validate();
    {
        std::unique_lock lock(mutex_);
        if (in_flight_ >= max_in_flight_) {
            if (queued_ >= max_queued_) {
                throw GenerationError(GenerationError::Kind::Busy, "generation queue is full", card.id);
            }
            ++queued_;
            slot_freed_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
            --queued_;
        }
        ++in_flight_;
    }
    struct Release {
        GenerationDispatcher& self;
        ~Release() {
            {
                std::lock_guard lock(self.mutex_);
                --self.in_flight_;
            }
            self.slot_freed_.notify_one();
        }
    } release{*this};
    return backend_.generate(request, card);
}

}  // namespace promptrouter
