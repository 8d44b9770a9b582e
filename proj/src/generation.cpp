#include "msgw/generation.hpp"

#include "msgw/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace msgw {

GenerationRequest build_request(const QueryAnalysis& qa, const ProviderDocument* doc) {
    if (qa.query_class == QueryClass::WeatherQuery) {
        if (doc == nullptr)
            throw MissingDataError();
        return GenerationRequest::forecast(qa.original_text, serialize_dataset(doc->dataset));
    }
    return GenerationRequest::general(qa.original_text);
}

std::string compose_message(const GenerationRequest& req) {
    if (!req.dataset())
        return req.user_query();
    auto query = req.user_query();
    std::replace(query.begin(), query.end(), '\n', ' ');
    return query + "\n" + *req.dataset();
}

GenerationRequest parse_composed_message(const std::string& message) {
    auto newline = message.find('\n');
    if (newline != std::string::npos) {
        auto rest = message.substr(newline + 1);
        try {
            deserialize_dataset(rest);
            return GenerationRequest::forecast(message.substr(0, newline), std::move(rest));
        } catch (const ParseError&) {
        }
    }
    return GenerationRequest::general(message);
}

std::string render_template_bulletin(const ForecastDataset& dataset) {
    const auto& slots = dataset.slots();
    int max_probability = 0;
    int cloud_total = 0;
    double min_temp = slots.front().temperature_c();
    double max_temp = min_temp;
    const WeatherSlot* windiest = &slots.front();
    for (const auto& slot : slots) {
        max_probability = std::max(max_probability, slot.precipitation_probability_pct());
        cloud_total += slot.cloud_cover_pct();
        min_temp = std::min(min_temp, slot.temperature_c());
        max_temp = std::max(max_temp, slot.temperature_c());
        if (slot.wind_speed_kmh() > windiest->wind_speed_kmh())
            windiest = &slot;
    }
    double mean_cloud = static_cast<double>(cloud_total) / static_cast<double>(slots.size());
    const auto& where = dataset.location_name();

    std::string sky;
    if (max_probability >= 60)
        sky = "Rain is expected in " + where + " today.";
    else if (max_probability >= 30)
        sky = "Showers are possible in " + where + " today.";
    else if (mean_cloud >= 70.0)
        sky = "Overcast skies over " + where + " today.";
    else if (mean_cloud >= 30.0)
        sky = "Partly cloudy skies over " + where + " today.";
    else
        sky = "Clear skies over " + where + " today.";

    auto whole = [](double v) { return std::to_string(std::lround(v)); };
    return sky + " Temperatures from " + whole(min_temp) + "°C to " + whole(max_temp) + "°C. Wind up to " +
           whole(windiest->wind_speed_kmh()) + " km/h from the " +
           std::string(compass_point(windiest->wind_direction_deg())) + ".";
}

Bulletin template_generate(const GenerationRequest& req) {
    if (req.mode() != GenerationMode::Forecast || !req.dataset())
        throw UnsupportedModeError();
    auto dataset = deserialize_dataset(*req.dataset());
    return Bulletin(render_template_bulletin(dataset), "template", dataset.location_name());
}

Bulletin EchoBackend::generate(const GenerationRequest& req) const {
    auto text = compose_message(req);
    if (text.empty())
        throw BackendError(BackendErrorKind::BadResponse, "nothing to echo");
    return Bulletin(std::move(text), backend_id(), "");
}

Bulletin CannedReplyBackend::generate(const GenerationRequest&) const {
    return Bulletin(reply_, backend_id(), "");
}

Bulletin RoutingBackend::generate(const GenerationRequest& req) const {
    return req.mode() == GenerationMode::Forecast ? forecast_->generate(req) : general_->generate(req);
}

std::shared_ptr<const GeneratorBackend> make_template_service_backend() {
    return std::make_shared<RoutingBackend>(std::make_shared<TemplateBackend>(),
                                            std::make_shared<CannedReplyBackend>(std::string(kGeneralReply)));
}

InFlightLimit::InFlightLimit(int limit) : limit_(std::max(1, limit)) {}

InFlightLimit::Permit InFlightLimit::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return active_ < limit_; });
    ++active_;
    peak_ = std::max(peak_, active_);
    return Permit(*this);
}

void InFlightLimit::release() {
    {
        std::lock_guard lock(mutex_);
        --active_;
    }
    cv_.notify_one();
}

int InFlightLimit::peak() const {
    std::lock_guard lock(mutex_);
    return peak_;
}

Bulletin remote_generate(const GenerationRequest& req, const std::string& endpoint, const HttpClient& client) {
    nlohmann::json body{{"message", compose_message(req)}};
    HttpResponse response;
    try {
        response = client.post_json(endpoint, body.dump());
    } catch (const TransportError& e) {
        throw BackendError(e.failure() == TransportFailure::Timeout ? BackendErrorKind::Timeout
                                                                    : BackendErrorKind::Network,
                           std::string("model server: ") + e.what());
    }
    if (response.status == 500)
        throw BackendError(BackendErrorKind::InternalServerError, "model server: Internal Server Error");
    if (response.status != 200)
        throw BackendError(BackendErrorKind::BadStatus,
                           "model server returned HTTP " + std::to_string(response.status));

    auto reply = nlohmann::json::parse(response.body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("message") || !reply["message"].is_string() ||
        reply["message"].get_ref<const std::string&>().empty())
        throw BackendError(BackendErrorKind::BadResponse, "model server reply has no message field");

    std::string location;
    if (req.dataset()) {
        auto doc = nlohmann::json::parse(*req.dataset(), nullptr, false);
        if (doc.is_object() && doc.contains("location") && doc["location"].is_string())
            location = doc["location"].get<std::string>();
    }
    return Bulletin(reply["message"].get<std::string>(), "remote:" + endpoint, location);
}

Bulletin RemoteBackend::generate(const GenerationRequest& req) const {
    auto permit = limit_->acquire();
    return remote_generate(req, endpoint_, *client_);
}

} // namespace msgw
