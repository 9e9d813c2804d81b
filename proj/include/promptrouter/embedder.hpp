#pragma once

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter {

namespace http {
class ClientPool;
}

using Embedding = std::vector<double>;

/// Text -> unit-norm vector. `id()` and `dimension()` are recorded in the
/// advantage DB and must match at query time.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// Throws AdvantageError on blank text.
    virtual Embedding embed(std::string_view text) const = 0;
    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
};

/// Deterministic bag-of-words embedder: lowercase alphanumeric tokens are
/// hashed (FNV-1a) into `dimension` buckets, counted, and L2-normalized. Text
/// without tokens maps to the first basis vector.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = 256);

    Embedding embed(std::string_view text) const override;
    std::string id() const override;
    std::size_t dimension() const override { return dimension_; }

private:
    std::size_t dimension_;
};

struct RemoteEmbedderOptions {
    std::string base_url;
    std::string model;
    std::size_t dimension = 0;
    std::chrono::milliseconds timeout{30'000};
};

/// OpenAI-style embeddings endpoint (`POST {base}/v1/embeddings`). Returned
/// vectors are renormalized; a length other than `dimension` is an error.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteEmbedderOptions options);
    ~RemoteEmbedder() override;

    Embedding embed(std::string_view text) const override;
    std::string id() const override;
    std::size_t dimension() const override { return options_.dimension; }

private:
    RemoteEmbedderOptions options_;
    std::string path_;
    std::unique_ptr<http::ClientPool> pool_;
};

double dot(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const double> b);

/// In-place L2 normalization; a zero vector becomes e0.
void normalize(std::span<double> v);

}  // namespace promptrouter
