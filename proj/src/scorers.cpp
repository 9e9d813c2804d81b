#include "promptrouter/scorers.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/http.hpp"
#include "promptrouter/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace promptrouter {

namespace {

double unit_hash(std::string_view s) noexcept {
    return static_cast<double>(codec::fnv1a64(s) % 1000003ULL) / 1000003.0;
}

bool hits_any(const Lexicon& lexicon, const std::vector<std::string>& words, const std::vector<std::string>& tags) {
    return std::any_of(tags.begin(), tags.end(), [&](const std::string& tag) {
        return overlap_score(lexicon, words, text::normalize_label(tag)) > 0.0;
    });
}

}  // namespace

SyntheticAffinityScorer::SyntheticAffinityScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

double SyntheticAffinityScorer::quality(std::string_view model_id) noexcept {
    return unit_hash(std::string("quality|") + std::string(model_id));
}

double SyntheticAffinityScorer::score(const ModelCard& model, std::string_view prompt) {
    const auto words = text::words(prompt);
    const double subject = hits_any(lexicon_, words, model.subject_tags) ? 1.0 : 0.0;
    const double style = hits_any(lexicon_, words, model.style_tags) ? 1.0 : 0.0;
    const double jitter = unit_hash(model.id + "|" + std::string(prompt));
    return 0.10 + 0.45 * subject + 0.25 * style + 0.15 * quality(model.id) + 0.05 * jitter;
}

RemoteScorer::RemoteScorer(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {
    http::parse_url(url_);
}

double RemoteScorer::score(const ModelCard& model, std::string_view prompt) {
    const nlohmann::json request{{"model_id", model.id}, {"prompt", std::string(prompt)}};
    http::Response res;
    try {
        res = http::post_json(url_, request.dump(), timeout_);
    } catch (const http::TransportError& e) {
        throw AdvantageError(std::string("reward endpoint unreachable: ") + e.what());
    }
    if (res.status != 200) throw AdvantageError("reward endpoint returned status " + std::to_string(res.status));
    try {
        return nlohmann::json::parse(res.body).at("score").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw AdvantageError(std::string("malformed reward response: ") + e.what());
    }
}

}  // namespace promptrouter
