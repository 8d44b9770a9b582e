#ifndef MSGW_HTTP_CLIENT_HPP
#define MSGW_HTTP_CLIENT_HPP

#include <chrono>
#include <string>

namespace msgw {

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Blocking HTTP client. Implementations must be safe for concurrent use.
/// Transport failures throw TransportError; any HTTP status is returned.
class HttpClient {
public:
    virtual ~HttpClient() = default;

    virtual HttpResponse get(const std::string& url) const = 0;
    virtual HttpResponse post_json(const std::string& url, const std::string& body) const = 0;
};

struct HttpClientOptions {
    std::chrono::milliseconds timeout{10'000};
    std::string user_agent = "msgw/1.0";
};

/// cpp-httplib backed client; opens one connection per call, so instances
/// are trivially thread-safe. Supports http and https URLs.
class NetworkHttpClient : public HttpClient {
public:
    explicit NetworkHttpClient(HttpClientOptions options = {}) : options_(std::move(options)) {}

    HttpResponse get(const std::string& url) const override;
    HttpResponse post_json(const std::string& url, const std::string& body) const override;

    const HttpClientOptions& options() const noexcept { return options_; }

private:
    HttpClientOptions options_;
};

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // starts with '/'
};

// Throws ValueError for URLs without an http/https scheme.
SplitUrl split_url(const std::string& url);

} // namespace msgw

#endif
