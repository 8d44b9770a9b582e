#include "msgw/model_server.hpp"

#include "msgw/errors.hpp"
#include "msgw/gateway.hpp"
#include "msgw/input_processing.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <ctime>
#include <ostream>

namespace msgw {

std::string iso_timestamp(std::chrono::system_clock::time_point when) {
    auto secs = std::chrono::time_point_cast<std::chrono::seconds>(when);
    auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(when - secs).count();
    std::time_t t = std::chrono::system_clock::to_time_t(secs);
    std::tm utc{};
    gmtime_r(&t, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &utc);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
    return out;
}

void RequestLog::record(std::chrono::system_clock::time_point when, std::size_t request_length, int status,
                        std::chrono::milliseconds duration, std::string_view message, std::string_view reply) {
    std::string line = iso_timestamp(when) + "\t" + std::to_string(request_length) + "\t" + std::to_string(status) +
                       "\t" + std::to_string(duration.count());
    if (log_full_) {
        auto quoted = [](std::string_view s) {
            return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        };
        line += "\t" + quoted(message) + "\t" + quoted(reply);
    }
    line += "\n";
    std::lock_guard lock(mutex_);
    if (sink_) {
        *sink_ << line;
        sink_->flush();
    }
    ++count_;
}

std::size_t RequestLog::count() const {
    std::lock_guard lock(mutex_);
    return count_;
}

HttpReply ModelServer::handle_meteo(std::string_view request_body) const {
    auto started_wall = std::chrono::system_clock::now();
    auto started = std::chrono::steady_clock::now();
    std::string message;
    std::string reply_text;
    HttpReply reply;
    try {
        auto parsed = nlohmann::json::parse(request_body, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("message") ||
            !parsed["message"].is_string())
            throw ValueError("request body must be {\"message\": string}");
        message = strip_control_chars(parsed["message"].get<std::string>());
        if (message.empty())
            throw EmptyInputError();
        auto request = parse_composed_message(message);
        auto permit = limit_->acquire();
        reply_text = backend_->generate(request).text();
        reply = HttpReply{200, message_body(reply_text)};
    } catch (const std::exception& e) {
        reply_text = e.what();
        reply = HttpReply{500, message_body(reply_text)};
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (log_)
        log_->record(started_wall, request_body.size(), reply.status, elapsed, message, reply_text);
    return reply;
}

void register_model_routes(httplib::Server& server, const ModelServer& model) {
    server.Post("/meteo", [&model](const httplib::Request& req, httplib::Response& res) {
        auto reply = model.handle_meteo(req.body);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
}

} // namespace msgw
