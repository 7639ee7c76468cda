#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "spellforge/core.hpp"
#include "spellforge/textmodel.hpp"

namespace spellforge {

enum class BackendKind { Builtin, External };

// A prediction provider. Every predict() result has passed
// validate_prediction(); a reply that fails it raises ValidationError with
// code "invalid_prediction", distinct from BackendError.
class Backend {
public:
    virtual ~Backend() = default;

    virtual BackendKind kind() const noexcept = 0;
    virtual const std::string& model_id() const noexcept = 0;
    virtual std::size_t type_count() const noexcept = 0;
    virtual std::array<double, kStatusCount> status_bounds() const = 0;

    virtual RawPrediction predict(std::string_view prompt) const = 0;
};

// Shared-immutable wrapper over a trained linear model.
class BuiltinBackend final : public Backend {
public:
    explicit BuiltinBackend(std::shared_ptr<const LinearSpellModel> model);

    BackendKind kind() const noexcept override { return BackendKind::Builtin; }
    const std::string& model_id() const noexcept override { return model_->model_id; }
    std::size_t type_count() const noexcept override { return model_->type_count(); }
    std::array<double, kStatusCount> status_bounds() const override { return model_->status_bounds(); }

    RawPrediction predict(std::string_view prompt) const override;

    const LinearSpellModel& model() const noexcept { return *model_; }

private:
    std::shared_ptr<const LinearSpellModel> model_;
};

struct ExternalBackendOptions {
    std::size_t type_count = 5;
    std::array<double, kStatusCount> status_bounds = StatusRanges::defaults().bounds();
    std::chrono::milliseconds timeout{2000};
};

// Child process speaking newline-delimited JSON over stdin/stdout:
//   -> {"op":"hello","version":1}          <- {"op":"hello","model_id":...}
//   -> {"op":"predict","prompt":...}       <- {"type_probs":[...],"statuses":[...],"effects":[[...]x4]}
// Requests are serialized; one in flight per instance.
class ExternalBackend final : public Backend {
public:
    ~ExternalBackend() override;
    ExternalBackend(const ExternalBackend&) = delete;
    ExternalBackend& operator=(const ExternalBackend&) = delete;

    BackendKind kind() const noexcept override { return BackendKind::External; }
    const std::string& model_id() const noexcept override { return model_id_; }
    std::size_t type_count() const noexcept override { return options_.type_count; }
    std::array<double, kStatusCount> status_bounds() const override { return options_.status_bounds; }

    RawPrediction predict(std::string_view prompt) const override;

    int pid() const noexcept { return pid_; }

private:
    friend std::unique_ptr<ExternalBackend> spawn_external_backend(const std::vector<std::string>&,
                                                                   const ExternalBackendOptions&);
    explicit ExternalBackend(ExternalBackendOptions options) : options_(options) {}

    void send_line(const std::string& line) const;
    std::string read_line() const;
    void shutdown() noexcept;

    ExternalBackendOptions options_;
    std::string model_id_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    mutable std::string buffer_;
    mutable bool broken_ = false;
    mutable std::mutex mutex_;
};

// Starts `command` (argv form, PATH-resolved) and completes the handshake.
// Throws BackendError on spawn failure, early exit or handshake timeout.
std::unique_ptr<ExternalBackend> spawn_external_backend(const std::vector<std::string>& command,
                                                        const ExternalBackendOptions& options = {});

// Decodes a predict reply. Throws ProtocolError naming the offending field.
RawPrediction parse_prediction_reply(std::string_view line);

} // namespace spellforge
