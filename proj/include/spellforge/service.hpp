#pragma once

// JSON-over-HTTP front end. Request handling lives in Service and is usable
// without a socket; HttpServer wires it to cpp-httplib.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "spellforge/backend.hpp"
#include "spellforge/config.hpp"

namespace httplib {
class Server;
}

namespace spellforge {

inline constexpr std::uint64_t kMaxSimulationTicks = 2400;

struct HttpReply {
    int status = 200;
    std::string body; // JSON
};

// Error bodies are {"error": {"code": ..., "message": ...}}.
HttpReply error_reply(int status, std::string_view code, std::string_view message);

// Stateless request handlers over a shared read-only backend.
class Service {
public:
    Service(std::shared_ptr<const Backend> backend, EngineConfig config);

    HttpReply health() const;
    // Body {"prompt": string}.
    HttpReply forge(std::string_view body) const;
    // Body {"spell_a": SpellSpec, "spell_b": SpellSpec, "seed": uint,
    //       "max_ticks"?: uint <= 2400, "policy"?: ..., "frames"?: bool}.
    HttpReply simulate(std::string_view body) const;

    const EngineConfig& config() const noexcept { return config_; }

private:
    std::shared_ptr<const Backend> backend_;
    EngineConfig config_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080; // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
    bool cors = false;
};

class HttpServer {
public:
    HttpServer(const Service& service, ServerOptions options);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds the listening socket and returns the port. Throws IoError when
    // the port is taken or the static directory is missing.
    int bind();
    // Serves until stop(); call after bind().
    void run();
    // Safe from another thread or a signal handler, before or during run().
    void stop();

private:
    const Service& service_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<bool> started_{false};
    std::atomic<bool> finished_{false};
    std::atomic<bool> stop_requested_{false};
};

} // namespace spellforge
