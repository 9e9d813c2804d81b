#include "promptrouter/embedder.hpp"

#include "promptrouter/codec.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/http.hpp"
#include "promptrouter/text.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <numeric>

namespace promptrouter {

namespace {

std::vector<std::string> alnum_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c) != 0) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

void normalize(std::span<double> v) {
    if (v.empty()) return;
    const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (n == 0.0 || !std::isfinite(n)) {
        std::fill(v.begin(), v.end(), 0.0);
        v[0] = 1.0;
        return;
    }
    for (auto& x : v) x /= n;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw AdvantageError("embedding dimension must be positive");
}

std::string HashingEmbedder::id() const { return "fnv1a-bow-" + std::to_string(dimension_); }

Embedding HashingEmbedder::embed(std::string_view text) const {
    if (text::trim(text).empty()) throw AdvantageError("cannot embed empty text");
    Embedding v(dimension_, 0.0);
    for (const auto& tok : alnum_tokens(text)) v[codec::fnv1a64(tok) % dimension_] += 1.0;
    normalize(v);
    return v;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw ConfigError("remote embedder needs a base URL");
    if (options_.dimension == 0) throw ConfigError("remote embedder must declare its dimension");
    const auto url = http::parse_url(options_.base_url);
    path_ = url.path == "/" ? std::string{} : url.path;
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += path_.ends_with("/v1") ? "/embeddings" : "/v1/embeddings";
    pool_ = std::make_unique<http::ClientPool>(url.origin, options_.timeout);
}

RemoteEmbedder::~RemoteEmbedder() = default;

std::string RemoteEmbedder::id() const { return "remote:" + options_.model + ":" + std::to_string(options_.dimension); }

Embedding RemoteEmbedder::embed(std::string_view text) const {
    if (text::trim(text).empty()) throw AdvantageError("cannot embed empty text");
    const nlohmann::json request{{"model", options_.model}, {"input", std::string(text)}};
    http::Response res;
    try {
        res = pool_->post_json(path_, request.dump());
    } catch (const http::TransportError& e) {
        throw AdvantageError(std::string("embedding request failed: ") + e.what());
    }
    if (res.status != 200) throw AdvantageError("embedding backend returned status " + std::to_string(res.status));
    Embedding v;
    try {
        v = nlohmann::json::parse(res.body).at("data").at(0).at("embedding").get<Embedding>();
    } catch (const nlohmann::json::exception& e) {
        throw AdvantageError(std::string("malformed embedding response: ") + e.what());
    }
    if (v.size() != options_.dimension) {
        throw AdvantageError("embedding dimension mismatch: expected " + std::to_string(options_.dimension) + ", got " +
                             std::to_string(v.size()));
    }
    normalize(v);
    return v;
}

}  // namespace promptrouter
