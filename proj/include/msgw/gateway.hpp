#ifndef MSGW_GATEWAY_HPP
#define MSGW_GATEWAY_HPP

#include "msgw/gazetteer.hpp"
#include "msgw/generation.hpp"
#include "msgw/html.hpp"
#include "msgw/http_client.hpp"
#include "msgw/input_processing.hpp"
#include "msgw/provider.hpp"
#include "msgw/server.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace httplib {
class Server;
}

namespace msgw {

// "#rrggbb" (lowercased) or one of red, green, blue, gray, white, black.
// Throws InvalidColourError for anything else.
std::string validate_colour(std::string_view colour);

// <div class="chat-message" style="background-color:{colour}"><span
// class="sender">{sender}</span><p>{text}</p></div>, sender and text escaped.
std::string render_message_html(std::string_view sender, std::string_view text, std::string_view colour);

// POST /html: {"sender", "text", "colour"} strings -> 200 {"message": html};
// any failure -> 500 {"message": error}.
HttpReply handle_html_endpoint(std::string_view request_body);

inline constexpr std::string_view kClampNotice = "Note: only today's forecast is currently available. ";

/// The query pipeline behind /meteo-query and the one-shot CLI query:
/// sanitize, analyze, fetch the forecast for weather queries, generate.
/// Holds only read-only state; answer() may run concurrently.
class Pipeline {
public:
    Pipeline(std::shared_ptr<const Gazetteer> gazetteer, std::shared_ptr<const Lexicon> lexicon,
             std::shared_ptr<const HttpClient> provider_client, ProviderOptions provider_options,
             std::shared_ptr<const GeneratorBackend> backend);

    // Reply text; throws InputTooLongError, EmptyInputError, ProviderError,
    // ParseError, BackendError and friends.
    std::string answer(std::string_view raw_query) const;

    const GeneratorBackend& backend() const noexcept { return *backend_; }

private:
    std::shared_ptr<const Gazetteer> gazetteer_;
    std::shared_ptr<const Lexicon> lexicon_;
    std::shared_ptr<const HttpClient> provider_client_;
    ProviderOptions provider_options_;
    std::shared_ptr<const GeneratorBackend> backend_;
};

// POST /meteo-query: {"message": string} -> 200 {"message": reply}; any
// failure -> 500 {"message": error}. Nothing is stored.
HttpReply handle_meteo_query(std::string_view request_body, const Pipeline& pipeline);

struct GatewayOptions {
    // Origins echoed in Access-Control-Allow-Origin; "*" allows any.
    std::vector<std::string> allowed_origins{"http://localhost:5173"};
};

// Registers POST /html, POST /meteo-query and their CORS preflights. The
// pipeline must outlive the server.
void register_gateway_routes(httplib::Server& server, const Pipeline& pipeline, const GatewayOptions& options = {});

// JSON {"message": text} with invalid UTF-8 replaced.
std::string message_body(std::string_view text);

} // namespace msgw

#endif
