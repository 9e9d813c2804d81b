#pragma once

#include "offline_guard.hpp"

#include <httplib.h>

#include <string>
#include <thread>

namespace testkit {

/// httplib server on an ephemeral loopback port, served from a background
/// thread. Holds a LoopbackScope for its whole lifetime so clients in the
/// same process may connect to it.
class FakeServer {
public:
    httplib::Server server;

    FakeServer() = default;
    ~FakeServer() { stop(); }
    FakeServer(const FakeServer&) = delete;
    FakeServer& operator=(const FakeServer&) = delete;

    /// Call after registering handlers.
    void start() {
        port_ = server.bind_to_any_port("127.0.0.1");
        worker_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    void stop() {
        if (!worker_.joinable()) return;
        server.stop();
        worker_.join();
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    offline_guard::LoopbackScope scope_;
    int port_ = 0;
    std::thread worker_;
};

}  // namespace testkit
