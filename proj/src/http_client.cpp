#include "msgw/http_client.hpp"

#include "msgw/errors.hpp"

#include <httplib.h>

namespace msgw {

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ValueError("URL has no scheme: " + url);
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ValueError("unsupported URL scheme: " + scheme);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

httplib::Client make_client(const SplitUrl& target, const HttpClientOptions& options) {
    httplib::Client client(target.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_keep_alive(false);
    return client;
}

template <typename Call>
HttpResponse perform(const std::string& url, const HttpClientOptions& options, Call&& call) {
    auto target = split_url(url);
    auto client = make_client(target, options);
    httplib::Headers headers{{"User-Agent", options.user_agent}};
    auto started = std::chrono::steady_clock::now();
    auto result = call(client, target.path, headers);
    if (!result) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        auto err = result.error();
        // httplib reports an expired read timeout as a plain read error.
        bool timed_out = err == httplib::Error::ConnectionTimeout ||
                         ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                          elapsed >= options.timeout * 9 / 10);
        throw TransportError(timed_out ? TransportFailure::Timeout : TransportFailure::Network,
                             url + ": " + httplib::to_string(err));
    }
    return HttpResponse{result->status, result->body};
}

} // namespace

HttpResponse NetworkHttpClient::get(const std::string& url) const {
    return perform(url, options_, [](httplib::Client& client, const std::string& path, const httplib::Headers& h) {
        return client.Get(path, h);
    });
}

HttpResponse NetworkHttpClient::post_json(const std::string& url, const std::string& body) const {
    return perform(url, options_,
                   [&body](httplib::Client& client, const std::string& path, const httplib::Headers& h) {
                       return client.Post(path, h, body, "application/json");
                   });
}

} // namespace msgw
