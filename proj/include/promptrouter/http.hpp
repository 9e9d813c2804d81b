#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace promptrouter::http {

struct Response {
    int status = 0;
    std::string body;
};

/// Transport-level failure (no HTTP status was received).
class TransportError : public std::runtime_error {
public:
    TransportError(bool timed_out, const std::string& message)
        : std::runtime_error(message), timed_out_(timed_out) {}

    bool timed_out() const noexcept { return timed_out_; }

private:
    bool timed_out_;
};

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // begins with '/'
};

/// Splits an absolute http:// URL. Throws std::invalid_argument otherwise.
Url parse_url(std::string_view url);

using Headers = std::multimap<std::string, std::string>;

/// Keep-alive clients for one origin. Each call borrows an idle client (or
/// opens a new one) so concurrent callers never wait on each other.
class ClientPool {
public:
    ClientPool(std::string origin, std::chrono::milliseconds timeout, std::size_t max_idle = 4);
    ~ClientPool();

    ClientPool(const ClientPool&) = delete;
    ClientPool& operator=(const ClientPool&) = delete;

    Response post_json(const std::string& path, const std::string& body, const Headers& headers = {});

    const std::string& origin() const noexcept { return origin_; }

private:
    struct Client;

    std::unique_ptr<Client> acquire();
    void release(std::unique_ptr<Client> client);

    std::string origin_;
    std::chrono::milliseconds timeout_;
    std::size_t max_idle_;
    std::mutex mutex_;
    std::vector<std::unique_ptr<Client>> idle_;
};

/// One-shot POST to an absolute URL.
Response post_json(std::string_view url, const std::string& body, std::chrono::milliseconds timeout,
                   const Headers& headers = {});

}  // namespace promptrouter::http
