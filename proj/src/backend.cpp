#include "spellforge/backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "spellforge/error.hpp"

namespace spellforge {

namespace {

void check_prediction(RawPrediction& pred, std::size_t type_count, const std::array<double, kStatusCount>& bounds) {
    for (std::size_t k = 0; k < kStatusCount; ++k) {
        auto& v = pred.status_raws.values[k];
        if (std::isfinite(v)) v = std::clamp(v, 0.0, bounds[k]);
    }
    const auto result = validate_prediction(pred, type_count, bounds);
    if (!result.ok()) throw ValidationError("prediction failed validation: " + result.summary(), "invalid_prediction");
}

} // namespace

BuiltinBackend::BuiltinBackend(std::shared_ptr<const LinearSpellModel> model) : model_(std::move(model)) {
    if (!model_) throw InputError("builtin backend needs a model");
}

RawPrediction BuiltinBackend::predict(std::string_view prompt) const {
    auto pred = model_->predict(prompt);
    check_prediction(pred, type_count(), status_bounds());
    return pred;
}

RawPrediction parse_prediction_reply(std::string_view line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error&) {
        throw ProtocolError("backend reply is not valid JSON");
    }
    if (!j.is_object()) throw ProtocolError("backend reply must be a JSON object");
    RawPrediction pred;

    if (!j.contains("type_probs") || !j["type_probs"].is_array()) {
        throw ProtocolError("type_probs: missing or not an array");
    }
    for (const auto& p : j["type_probs"]) {
        if (!p.is_number()) throw ProtocolError("type_probs: entries must be numbers");
        pred.type_probs.push_back(p.get<double>());
    }

    if (!j.contains("statuses") || !j["statuses"].is_array() || j["statuses"].size() != kStatusCount) {
        throw ProtocolError("statuses: expected an array of " + std::to_string(kStatusCount) + " numbers");
    }
    for (std::size_t k = 0; k < kStatusCount; ++k) {
        const auto& v = j["statuses"][k];
        if (!v.is_number()) throw ProtocolError("statuses: entries must be numbers");
        pred.status_raws.values[k] = v.get<double>();
    }

    if (!j.contains("effects")) throw ProtocolError("effects: missing");
    const auto& eff = j["effects"];
    std::size_t cells = 0;
    if (eff.is_array()) {
        for (const auto& row : eff) cells += row.is_array() ? row.size() : 1;
    }
    if (!eff.is_array() || eff.size() != kTriggerRows || cells != kEffectCells) {
        throw ProtocolError("effects: expected 4 rows of 4 cells (16 total), got " + std::to_string(cells) + " cells");
    }
    try {
        pred.effects = matrix_from_json(eff, "effects");
    } catch (const FormatError& e) {
        throw ProtocolError(e.what());
    }
    return pred;
}

// ---------------------------------------------------------------------------
// External process
// ---------------------------------------------------------------------------

std::unique_ptr<ExternalBackend> spawn_external_backend(const std::vector<std::string>& command,
                                                        const ExternalBackendOptions& options) {
    if (command.empty()) throw InputError("external backend command is empty");
    // A dead child must surface as EPIPE, not kill the engine.
    ::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];   // engine -> child stdin
    int out_pipe[2];  // child stdout -> engine
    int exec_pipe[2]; // reports exec failure
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
    }
    if (::pipe2(exec_pipe, O_CLOEXEC) != 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        throw BackendError("pipe failed: " + std::string(std::strerror(errno)));
    }

    std::vector<char*> argv;
    for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], exec_pipe[0], exec_pipe[1]}) ::close(fd);
        throw BackendError("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execvp(argv[0], argv.data());
        const int err = errno;
        [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof err);
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(exec_pipe[1]);

    std::unique_ptr<ExternalBackend> backend(new ExternalBackend(options));
    backend->pid_ = pid;
    backend->to_child_ = in_pipe[1];
    backend->from_child_ = out_pipe[0];

    int exec_errno = 0;
    const auto got = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
    ::close(exec_pipe[0]);
    if (got == static_cast<ssize_t>(sizeof exec_errno)) {
        throw BackendError("cannot start backend '" + command.front() + "': " + std::strerror(exec_errno),
                           "backend_spawn_failed");
    }

    std::lock_guard lock(backend->mutex_);
    backend->send_line(R"({"op":"hello","version":1})");
    const auto reply = backend->read_line();
    Json j;
    try {
        j = Json::parse(reply);
    } catch (const Json::parse_error&) {
        throw ProtocolError("handshake reply is not valid JSON");
    }
    if (!j.is_object() || j.value("op", "") != "hello" || !j.contains("model_id") || !j["model_id"].is_string()) {
        throw ProtocolError("handshake reply must be {\"op\":\"hello\",\"model_id\":<string>}");
    }
    backend->model_id_ = j["model_id"].get<std::string>();
    return backend;
}

ExternalBackend::~ExternalBackend() { shutdown(); }

void ExternalBackend::shutdown() noexcept {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        int status = 0;
        // Closing stdin asks the child to leave; give it a moment, then insist.
        for (int i = 0; i < 20; ++i) {
            if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                pid_ = -1;
                return;
            }
            ::usleep(5000);
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

void ExternalBackend::send_line(const std::string& line) const {
    if (broken_) throw BackendError("external backend is no longer usable after an earlier failure");
    std::string data = line + "\n";
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        const auto n = ::write(to_child_, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            broken_ = true;
            throw BackendError("backend process is not accepting input (" + std::string(std::strerror(errno)) + ")",
                               "backend_exited");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

std::string ExternalBackend::read_line() const {
    const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            broken_ = true;
            throw BackendError("backend did not reply within " + std::to_string(options_.timeout.count()) + " ms",
                               "backend_timeout");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (ready < 0) {
            if (errno == EINTR) continue;
            broken_ = true;
            throw BackendError("poll failed: " + std::string(std::strerror(errno)));
        }
        if (ready == 0) continue;
        char chunk[4096];
        const auto n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            broken_ = true;
            throw BackendError("read from backend failed: " + std::string(std::strerror(errno)));
        }
        if (n == 0) {
            broken_ = true;
            throw BackendError("backend process exited", "backend_exited");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

RawPrediction ExternalBackend::predict(std::string_view prompt) const {
    std::lock_guard lock(mutex_);
    Json req;
    req["op"] = "predict";
    req["prompt"] = std::string(prompt);
    send_line(req.dump());
    auto pred = parse_prediction_reply(read_line());
    check_prediction(pred, options_.type_count, options_.status_bounds);
    return pred;
}

} // namespace spellforge
