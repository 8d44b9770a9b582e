#include "msgw/gateway.hpp"

#include "msgw/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>

namespace msgw {

namespace {

constexpr std::array<std::string_view, 6> kNamedColours = {"red", "green", "blue", "gray", "white", "black"};

bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Parses a JSON object body and returns the named string fields; throws
// ValueError on any schema violation.
template <std::size_t N>
std::array<std::string, N> string_fields(std::string_view body, const std::array<const char*, N>& names) {
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw ValueError("request body must be a JSON object");
    std::array<std::string, N> values;
    for (std::size_t i = 0; i < N; ++i) {
        auto it = parsed.find(names[i]);
        if (it == parsed.end() || !it->is_string())
            throw ValueError(std::string("field '") + names[i] + "' must be a string");
        values[i] = it->template get<std::string>();
    }
    return values;
}

void install_cors(httplib::Server& server, const GatewayOptions& options) {
    auto origins = options.allowed_origins;
    server.set_post_routing_handler([origins](const httplib::Request& req, httplib::Response& res) {
        auto origin = req.get_header_value("Origin");
        if (origin.empty())
            return;
        bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
        if (any || std::find(origins.begin(), origins.end(), origin) != origins.end()) {
            res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
            res.set_header("Vary", "Origin");
        }
    });
    auto preflight = [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 200;
    };
    server.Options("/html", preflight);
    server.Options("/meteo-query", preflight);
}

} // namespace

std::string message_body(std::string_view text) {
    return nlohmann::json{{"message", text}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string validate_colour(std::string_view colour) {
    if (colour.size() == 7 && colour[0] == '#' && std::all_of(colour.begin() + 1, colour.end(), is_hex_digit)) {
        std::string out(colour);
        std::transform(out.begin(), out.end(), out.begin(),
                       [](char c) { return static_cast<char>(c >= 'A' && c <= 'F' ? c + ('a' - 'A') : c); });
        return out;
    }
    if (std::find(kNamedColours.begin(), kNamedColours.end(), colour) != kNamedColours.end())
        return std::string(colour);
    throw InvalidColourError();
}

std::string render_message_html(std::string_view sender, std::string_view text, std::string_view colour) {
    auto safe_colour = validate_colour(colour);
    return "<div class=\"chat-message\" style=\"background-color:" + safe_colour + "\"><span class=\"sender\">" +
           escape_html(sender) + "</span><p>" + escape_html(text) + "</p></div>";
}

HttpReply handle_html_endpoint(std::string_view request_body) {
    try {
        auto [sender, text, colour] =
            string_fields<3>(request_body, std::array<const char*, 3>{"sender", "text", "colour"});
        return HttpReply{200, message_body(render_message_html(sender, text, colour))};
    } catch (const std::exception& e) {
        return HttpReply{500, message_body(e.what())};
    }
}

Pipeline::Pipeline(std::shared_ptr<const Gazetteer> gazetteer, std::shared_ptr<const Lexicon> lexicon,
                   std::shared_ptr<const HttpClient> provider_client, ProviderOptions provider_options,
                   std::shared_ptr<const GeneratorBackend> backend)
    : gazetteer_(std::move(gazetteer)), lexicon_(std::move(lexicon)), provider_client_(std::move(provider_client)),
      provider_options_(std::move(provider_options)), backend_(std::move(backend)) {}

std::string Pipeline::answer(std::string_view raw_query) const {
    auto query = sanitize(raw_query);
    auto qa = analyze(query, *lexicon_, *gazetteer_);
    std::optional<ProviderDocument> doc;
    if (qa.query_class == QueryClass::WeatherQuery)
        doc = fetch_forecast(qa.location->coordinate, *provider_client_, provider_options_);
    auto request = build_request(qa, doc ? &*doc : nullptr);
    auto reply = backend_->generate(request).text();
    if (qa.window_clamped)
        reply.insert(0, kClampNotice);
    return reply;
}

HttpReply handle_meteo_query(std::string_view request_body, const Pipeline& pipeline) {
    try {
        auto [message] = string_fields<1>(request_body, std::array<const char*, 1>{"message"});
        return HttpReply{200, message_body(pipeline.answer(message))};
    } catch (const std::exception& e) {
        return HttpReply{500, message_body(e.what())};
    }
}

void register_gateway_routes(httplib::Server& server, const Pipeline& pipeline, const GatewayOptions& options) {
    install_cors(server, options);
    server.Post("/html", [](const httplib::Request& req, httplib::Response& res) {
        auto reply = handle_html_endpoint(req.body);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
    server.Post("/meteo-query", [&pipeline](const httplib::Request& req, httplib::Response& res) {
        auto reply = handle_meteo_query(req.body, pipeline);
        res.status = reply.status;
        res.set_content(reply.body, "application/json");
    });
}

} // namespace msgw
