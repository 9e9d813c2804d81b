#pragma once

#include "promptrouter/advantage.hpp"
#include "promptrouter/lexicon.hpp"

#include <chrono>
#include <string>

namespace promptrouter {

/// Offline stand-in for a reward model. Each model is good at the categories
/// it is tagged with:
///
///   score = 0.10 + 0.45 * [prompt hits one of the model's subject tags]
///                + 0.25 * [prompt hits one of the model's style tags]
///                + 0.15 * quality(model) + 0.05 * jitter(model, prompt)
///
/// where a "hit" means some prompt word names the tag or carries lexicon
/// weight toward it, and quality/jitter are FNV-1a derived values in [0, 1).
/// Scores therefore lie in [0.1, 1.0).
class SyntheticAffinityScorer final : public Scorer {
public:
    explicit SyntheticAffinityScorer(Lexicon lexicon);

    double score(const ModelCard& model, std::string_view prompt) override;

    /// The model's prompt-independent quality term in [0, 1).
    static double quality(std::string_view model_id) noexcept;

private:
    Lexicon lexicon_;
};

/// Reward endpoint: POST `{"model_id": str, "prompt": str}` -> `{"score": number}`.
class RemoteScorer final : public Scorer {
public:
    explicit RemoteScorer(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    double score(const ModelCard& model, std::string_view prompt) override;

private:
    std::string url_;
    std::chrono::milliseconds timeout_;
};

}  // namespace promptrouter
