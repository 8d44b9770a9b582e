#ifndef MSGW_SERVER_HPP
#define MSGW_SERVER_HPP

#include <functional>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace msgw {

// Status plus JSON body, as returned by the endpoint handlers.
struct HttpReply {
    int status = 200;
    std::string body;
};

/// An httplib server listening on its own thread; stops on destruction.
class BackgroundServer {
public:
    explicit BackgroundServer(const std::function<void(httplib::Server&)>& setup);
    ~BackgroundServer();

    BackgroundServer(const BackgroundServer&) = delete;
    BackgroundServer& operator=(const BackgroundServer&) = delete;

    // Binds and starts listening; port 0 picks a free port. Returns the bound
    // port. Throws IoError when the address cannot be bound.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

    int port() const noexcept { return port_; }
    std::string url(const std::string& path = "") const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_;
    int port_ = -1;
};

} // namespace msgw

#endif
