#include "stub_server.hpp"

#include <stdexcept>

#include <httplib.h>

namespace agentbench::testing {

StubServer::StubServer(const std::string& path, Handler handler)
    : server_(std::make_unique<httplib::Server>()) {
    server_->Post(path, std::move(handler));
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("stub server failed to bind");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

StubServer::~StubServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string StubServer::url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
}

}  // namespace agentbench::testing
