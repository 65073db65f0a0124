// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <set>
#include <string>
#include <thread>

#include <replaylab/explorer/fixture.hpp>

namespace httplib {
class Server;
}

namespace replaylab::explorer {

class ServerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ServerOptions {
    std::string host{"127.0.0.1"};
    int port{0};  // 0 picks a free port
    //! Fault injection: responses to these actions are cut in half.
    std::set<std::string> truncate_actions;
};

//! HTTP front for a FixtureStore. Serves GET /api?module=..&action=.. until stopped.
class Server {
  public:
    Server(FixtureStore store, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    void start();
    void stop();
    //! Blocks the calling thread until stop() is called from elsewhere.
    void wait();
    [[nodiscard]] int port() const { return port_; }
    [[nodiscard]] std::string url() const;

  private:
    FixtureStore store_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    int port_{0};
};

}  // namespace replaylab::explorer
