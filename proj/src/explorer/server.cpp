// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/explorer/server.hpp>

#include <httplib.h>

namespace replaylab::explorer {

Server::Server(FixtureStore store, ServerOptions options)
    : store_(std::move(store)), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
    http_->Get("/api", [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params[k] = v;
        std::string body = store_.query(params).dump();
        if (auto it = params.find("action"); it != params.end() && options_.truncate_actions.contains(it->second)) {
            body.resize(body.size() / 2);
        }
        res.set_content(body, "application/json");
    });
}

Server::~Server() { stop(); }

void Server::start() {
    if (options_.port == 0) {
        port_ = http_->bind_to_any_port(options_.host);
    } else {
        port_ = http_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ < 0) throw ServerError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void Server::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

void Server::wait() {
    if (thread_.joinable()) thread_.join();
}

std::string Server::url() const { return "http://" + options_.host + ":" + std::to_string(port_); }

}  // namespace replaylab::explorer
