#ifndef MSGW_GENERATION_HPP
#define MSGW_GENERATION_HPP

#include "msgw/domain.hpp"
#include "msgw/http_client.hpp"
#include "msgw/provider.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace msgw {

enum class GenerationMode { Forecast, General };

class GenerationRequest {
public:
    static GenerationRequest forecast(std::string user_query, std::string dataset_document) {
        return GenerationRequest(std::move(user_query), std::move(dataset_document), GenerationMode::Forecast);
    }
    static GenerationRequest general(std::string user_query) {
        return GenerationRequest(std::move(user_query), std::nullopt, GenerationMode::General);
    }

    const std::string& user_query() const noexcept { return user_query_; }
    // Canonical forecast document text; present iff mode() is Forecast.
    const std::optional<std::string>& dataset() const noexcept { return dataset_; }
    GenerationMode mode() const noexcept { return mode_; }

    bool operator==(const GenerationRequest&) const = default;

private:
    GenerationRequest(std::string q, std::optional<std::string> d, GenerationMode m)
        : user_query_(std::move(q)), dataset_(std::move(d)), mode_(m) {}

    std::string user_query_;
    std::optional<std::string> dataset_;
    GenerationMode mode_;
};

// Forecast mode for weather queries (embedding serialize_dataset of the
// document), General mode otherwise. Throws MissingDataError for a weather
// query without a document.
GenerationRequest build_request(const QueryAnalysis& qa, const ProviderDocument* doc);

// Wire text sent to a model server: the query alone in General mode, else
// query + '\n' + dataset document. Newlines inside the query are replaced by
// spaces in Forecast mode so the first newline always separates the parts.
std::string compose_message(const GenerationRequest& req);

// Inverse of compose_message. Falls back to General mode with the whole text
// when the part after the first newline is not a forecast document.
GenerationRequest parse_composed_message(const std::string& message);

class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;

    virtual std::string backend_id() const = 0;
    // Non-empty bulletin or a typed error; never mutates the request.
    virtual Bulletin generate(const GenerationRequest& req) const = 0;
};

// The three-sentence deterministic bulletin for a dataset.
std::string render_template_bulletin(const ForecastDataset& dataset);

// Throws UnsupportedModeError in General mode, ParseError when the dataset
// document does not decode.
Bulletin template_generate(const GenerationRequest& req);

class TemplateBackend : public GeneratorBackend {
public:
    std::string backend_id() const override { return "template"; }
    Bulletin generate(const GenerationRequest& req) const override { return template_generate(req); }
};

// Replies with compose_message(req); the wire-conformance stub.
class EchoBackend : public GeneratorBackend {
public:
    std::string backend_id() const override { return "echo"; }
    Bulletin generate(const GenerationRequest& req) const override;
};

// Fixed reply for every request.
class CannedReplyBackend : public GeneratorBackend {
public:
    explicit CannedReplyBackend(std::string reply) : reply_(std::move(reply)) {}

    std::string backend_id() const override { return "canned"; }
    Bulletin generate(const GenerationRequest& req) const override;

private:
    std::string reply_;
};

inline constexpr std::string_view kGeneralReply =
    "I can answer weather questions for known cities, for example: \"What is the weather in Paris today?\"";

/// Sends Forecast requests to one backend and General requests to another.
class RoutingBackend : public GeneratorBackend {
public:
    RoutingBackend(std::shared_ptr<const GeneratorBackend> forecast, std::shared_ptr<const GeneratorBackend> general)
        : forecast_(std::move(forecast)), general_(std::move(general)) {}

    std::string backend_id() const override { return forecast_->backend_id(); }
    Bulletin generate(const GenerationRequest& req) const override;

private:
    std::shared_ptr<const GeneratorBackend> forecast_;
    std::shared_ptr<const GeneratorBackend> general_;
};

// Template for forecasts, kGeneralReply for everything else.
std::shared_ptr<const GeneratorBackend> make_template_service_backend();

/// Counting gate bounding concurrent calls; excess callers block.
class InFlightLimit {
public:
    explicit InFlightLimit(int limit);

    class Permit {
    public:
        explicit Permit(InFlightLimit& owner) : owner_(&owner) {}
        Permit(Permit&& other) noexcept : owner_(std::exchange(other.owner_, nullptr)) {}
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;
        Permit& operator=(Permit&&) = delete;
        ~Permit() {
            if (owner_)
                owner_->release();
        }

    private:
        InFlightLimit* owner_;
    };

    Permit acquire();
    int limit() const noexcept { return limit_; }
    int peak() const;

private:
    void release();

    const int limit_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int active_ = 0;
    int peak_ = 0;
};

inline constexpr std::chrono::milliseconds kRemoteGenerateTimeout{120'000};

// POST {"message": compose_message(req)} and read the "message" field of a
// 200 reply. Throws BackendError: InternalServerError on 500, BadStatus on
// other statuses, Timeout/Network on transport failure, BadResponse when the
// reply lacks a non-empty string "message".
Bulletin remote_generate(const GenerationRequest& req, const std::string& endpoint, const HttpClient& client);

class RemoteBackend : public GeneratorBackend {
public:
    RemoteBackend(std::string endpoint, std::shared_ptr<const HttpClient> client, int max_in_flight = 4)
        : endpoint_(std::move(endpoint)), client_(std::move(client)),
          limit_(std::make_shared<InFlightLimit>(max_in_flight)) {}

    std::string backend_id() const override { return "remote:" + endpoint_; }
    Bulletin generate(const GenerationRequest& req) const override;

    const InFlightLimit& limit() const noexcept { return *limit_; }

private:
    std::string endpoint_;
    std::shared_ptr<const HttpClient> client_;
    std::shared_ptr<InFlightLimit> limit_;
};

} // namespace msgw

#endif
