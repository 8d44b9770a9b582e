#include "msgw/server.hpp"

#include "msgw/errors.hpp"

#include <httplib.h>

namespace msgw {

BackgroundServer::BackgroundServer(const std::function<void(httplib::Server&)>& setup)
    : server_(std::make_unique<httplib::Server>()) {
    // httplib's default SO_REUSEPORT would let a second server share a busy port.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    setup(*server_);
}

BackgroundServer::~BackgroundServer() {
    stop();
}

int BackgroundServer::start(const std::string& host, int port) {
    if (port < 0 || port > 65535)
        throw IoError("invalid port " + std::to_string(port));
    host_ = host;
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ < 0)
            throw IoError("cannot bind " + host);
    } else {
        if (!server_->bind_to_port(host, port))
            throw IoError("cannot bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void BackgroundServer::stop() {
    if (thread_.joinable()) {
        server_->stop();
        thread_.join();
    }
}

std::string BackgroundServer::url(const std::string& path) const {
    return "http://" + host_ + ":" + std::to_string(port_) + path;
}

} // namespace msgw
