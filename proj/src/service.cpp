#include "spellforge/service.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"

#include "spellforge/error.hpp"
#include "spellforge/forge.hpp"
#include "spellforge/sim.hpp"

namespace spellforge {

HttpReply error_reply(int status, std::string_view code, std::string_view message) {
    OrderedJson j;
    j["error"] = {{"code", code}, {"message", message}};
    return {status, j.dump()};
}

namespace {

int status_for(const Error& e) {
    if (dynamic_cast<const BackendError*>(&e)) return 502;
    if (dynamic_cast<const ValidationError*>(&e) && e.code() == "invalid_prediction") return 502;
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const FormatError*>(&e)) {
        return 400;
    }
    return 500;
}

template <typename F>
HttpReply guarded(F&& handler) {
    try {
        return handler();
    } catch (const Error& e) {
        return error_reply(status_for(e), e.code(), e.what());
    } catch (const Json::exception& e) {
        return error_reply(400, "bad_request", e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "internal", e.what());
    }
}

Json parse_body(std::string_view body) {
    auto j = Json::parse(body, nullptr, false);
    if (j.is_discarded()) throw InputError("request body is not valid JSON");
    if (!j.is_object()) throw InputError("request body must be a JSON object");
    return j;
}

} // namespace

Service::Service(std::shared_ptr<const Backend> backend, EngineConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
    if (!backend_) throw InputError("service needs a backend");
    config_.check();
}

HttpReply Service::health() const {
    OrderedJson j;
    j["status"] = "ok";
    j["model_id"] = backend_->model_id();
    return {200, j.dump()};
}

HttpReply Service::forge(std::string_view body) const {
    return guarded([&] {
        const auto j = parse_body(body);
        if (!j.contains("prompt") || !j["prompt"].is_string()) throw InputError("prompt: expected a string");
        const auto spell = spellforge::forge(j["prompt"].get<std::string>(), *backend_, config_);
        return HttpReply{200, forged_to_json(spell, config_.registry).dump()};
    });
}

HttpReply Service::simulate(std::string_view body) const {
    return guarded([&] {
        const auto j = parse_body(body);
        for (const char* key : {"spell_a", "spell_b"}) {
            if (!j.contains(key) || !j[key].is_object()) throw InputError(std::string(key) + ": expected a SpellSpec object");
        }
        if (!j.contains("seed") || !j["seed"].is_number_unsigned()) throw InputError("seed: expected a non-negative integer");

        DuelOptions options;
        options.arena = config_.arena;
        options.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("max_ticks")) {
            if (!j["max_ticks"].is_number_unsigned()) throw InputError("max_ticks: expected a positive integer");
            options.max_ticks = j["max_ticks"].get<std::uint64_t>();
            if (options.max_ticks == 0 || options.max_ticks > kMaxSimulationTicks) {
                throw InputError("max_ticks must be between 1 and " + std::to_string(kMaxSimulationTicks));
            }
        }
        if (j.contains("policy")) options.policy = policy_from_json(j["policy"]);
        if (j.contains("frames")) options.record_frames = j["frames"].get<bool>();

        const auto compile = [&](const char* key) {
            try {
                return compile_spell(spec_from_json(j[key]), config_.registry, config_.ranges, config_.effects);
            } catch (const Error& e) {
                throw InputError(std::string(key) + ": " + e.what());
            }
        };
        const auto a = compile("spell_a");
        const auto b = compile("spell_b");
        return HttpReply{200, duel_to_json(run_duel(a, b, options)).dump()};
    });
}

// ---------------------------------------------------------------------------
// HttpServer
// ---------------------------------------------------------------------------

HttpServer::HttpServer(const Service& service, ServerOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    auto& s = *server_;
    // The library default is SO_REUSEPORT, which lets a second server share a
    // busy port instead of failing.
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    const auto send = [](httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    };

    s.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, service_.health()); });
    s.Post("/api/forge", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.forge(req.body));
    });
    s.Post("/api/simulate", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.simulate(req.body));
    });

    if (options_.cors) {
        s.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        });
        s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    s.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send(res, error_reply(res.status, "not_found", "no such resource"));
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    if (options_.static_dir) {
        if (!server_->set_mount_point("/", options_.static_dir->string())) {
            throw IoError("static directory not found: " + options_.static_dir->string());
        }
    } else {
        server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("spellforge service: no UI bundle configured (start with --static DIR)\n", "text/plain");
        });
    }
    int port = options_.port;
    if (port == 0) {
        port = server_->bind_to_any_port(options_.host);
        if (port < 0) throw IoError("cannot bind " + options_.host);
    } else if (!server_->bind_to_port(options_.host, port)) {
        throw IoError("cannot bind " + options_.host + ":" + std::to_string(port) + " (port busy?)");
    }
    return port;
}

void HttpServer::run() {
    started_ = true;
    if (!stop_requested_) server_->listen_after_bind();
    finished_ = true;
}

void HttpServer::stop() {
    stop_requested_ = true;
    if (!started_) return;
    // stop() is a no-op until the accept loop is up, so wait for it.
    while (!server_->is_running() && !finished_) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    server_->stop();
}

} // namespace spellforge
