// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <replaylab/explorer/client.hpp>
#include <replaylab/explorer/server.hpp>
#include <replaylab/pipeline/scenario.hpp>

namespace replaylab::harness {

inline const std::filesystem::path kFixtureDir{REPLAYLAB_FIXTURE_DIR};

inline pipeline::RecordedChain record(const std::string& name) {
    return pipeline::record_scenario_file(kFixtureDir / "scenarios" / (name + ".json"), kFixtureDir);
}

inline constexpr explorer::RateLimiterPolicy kFast{0, 0, 0};

struct Served {
    explicit Served(const pipeline::RecordedChain& rec, explorer::ServerOptions opts = {})
        : server(explorer::FixtureStore::from_text(chain::export_snapshot(rec.state)), std::move(opts)) {
        server.start();
    }
    explorer::Server server;
};

inline explorer::HistoricBundle fetch(const Served& srv, const Address& a, std::size_t T) {
    explorer::VirtualClock clock;
    explorer::ExplorerClient client{srv.server.url(), kFast, clock};
    return explorer::fetch_bundle(client, a, T);
}

inline explorer::HistoricBundle fetch(const pipeline::RecordedChain& rec, const std::string& alias, std::size_t T) {
    Served srv{rec};
    return fetch(srv, rec.aliases.at(alias), T);
}

}  // namespace replaylab::harness
