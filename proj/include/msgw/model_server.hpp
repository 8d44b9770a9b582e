#ifndef MSGW_MODEL_SERVER_HPP
#define MSGW_MODEL_SERVER_HPP

#include "msgw/generation.hpp"
#include "msgw/server.hpp"

#include <chrono>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace msgw {

/// Append-only request log, one tab-separated line per request:
/// iso-timestamp, request length, status, duration in ms. With full logging
/// the request message and reply text follow as two JSON-quoted fields.
class RequestLog {
public:
    // sink may be null (count only). The sink must outlive the log.
    explicit RequestLog(std::ostream* sink, bool log_full = false) : sink_(sink), log_full_(log_full) {}

    void record(std::chrono::system_clock::time_point when, std::size_t request_length, int status,
                std::chrono::milliseconds duration, std::string_view message = {}, std::string_view reply = {});

    std::size_t count() const;
    bool log_full() const noexcept { return log_full_; }

private:
    std::ostream* sink_;
    bool log_full_;
    mutable std::mutex mutex_;
    std::size_t count_ = 0;
};

// UTC, millisecond precision: 2024-03-14T09:26:53.589Z
std::string iso_timestamp(std::chrono::system_clock::time_point when);

/// The /meteo peer: validates {"message": string}, strips control characters,
/// decodes the composed message and hands it to the backend.
class ModelServer {
public:
    ModelServer(std::shared_ptr<const GeneratorBackend> backend, std::shared_ptr<RequestLog> log,
                int max_in_flight = 4)
        : backend_(std::move(backend)), log_(std::move(log)), limit_(std::make_unique<InFlightLimit>(max_in_flight)) {}

    // 200 {"message": text} or 500 {"message": error}; logs exactly one line.
    HttpReply handle_meteo(std::string_view request_body) const;

    const InFlightLimit& limit() const noexcept { return *limit_; }

private:
    std::shared_ptr<const GeneratorBackend> backend_;
    std::shared_ptr<RequestLog> log_;
    std::unique_ptr<InFlightLimit> limit_;
};

// Registers POST /meteo. The model server must outlive the http server.
void register_model_routes(httplib::Server& server, const ModelServer& model);

} // namespace msgw

#endif
