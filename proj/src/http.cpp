#include "promptrouter/http.hpp"

#include <httplib.h>

namespace promptrouter::http {

struct ClientPool::Client {
    explicit Client(const std::string& origin) : impl(origin) {}
    httplib::Client impl;
};

namespace {

void configure(httplib::Client& client, std::chrono::milliseconds timeout) {
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_keep_alive(true);
}

Response perform(httplib::Client& client, const std::string& path, const std::string& body, const Headers& headers,
                 std::chrono::milliseconds timeout) {
    httplib::Headers h(headers.begin(), headers.end());
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
        const auto err = res.error();
        const auto elapsed = std::chrono::steady_clock::now() - started;
        // httplib reports an expired read timeout as a plain Read error
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                                elapsed >= timeout * 9 / 10);
        throw TransportError(timed_out, "HTTP request failed: " + httplib::to_string(err));
    }
    return Response{res->status, res->body};
}

}  // namespace

Url parse_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || url.substr(0, scheme_end) != "http") {
        throw std::invalid_argument("expected an absolute http:// URL, got '" + std::string(url) + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Url out;
    out.origin = std::string(url.substr(0, path_start));
    out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
    if (out.origin.size() <= scheme_end + 3) throw std::invalid_argument("URL has no host: " + std::string(url));
    return out;
}

ClientPool::ClientPool(std::string origin, std::chrono::milliseconds timeout, std::size_t max_idle)
    : origin_(std::move(origin)), timeout_(timeout), max_idle_(max_idle) {}

ClientPool::~ClientPool() = default;

std::unique_ptr<ClientPool::Client> ClientPool::acquire() {
    {
        std::lock_guard lock(mutex_);
        if (!idle_.empty()) {
            auto c = std::move(idle_.back());
            idle_.pop_back();
            return c;
        }
    }
    auto c = std::make_unique<Client>(origin_);
    configure(c->impl, timeout_);
    return c;
}

void ClientPool::release(std::unique_ptr<Client> client) {
    std::lock_guard lock(mutex_);
    if (idle_.size() < max_idle_) idle_.push_back(std::move(client));
}

Response ClientPool::post_json(const std::string& path, const std::string& body, const Headers& headers) {
    auto client = acquire();
    // a client whose request failed is dropped rather than returned to the pool
    auto response = perform(client->impl, path, body, headers, timeout_);
    release(std::move(client));
    return response;
}

Response post_json(std::string_view url, const std::string& body, std::chrono::milliseconds timeout,
                   const Headers& headers) {
    const Url parsed = parse_url(url);
    httplib::Client client(parsed.origin);
    configure(client, timeout);
    client.set_keep_alive(false);
    return perform(client, parsed.path, body, headers, timeout);
}

}  // namespace promptrouter::http
