// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>

#include <replaylab/explorer/client.hpp>
#include <replaylab/explorer/server.hpp>
#include <replaylab/pipeline/scenario.hpp>

using namespace replaylab;
using namespace replaylab::explorer;

namespace {

const std::filesystem::path kDir{REPLAYLAB_FIXTURE_DIR};

pipeline::RecordedChain record(const std::string& name) {
    return pipeline::record_scenario_file(kDir / "scenarios" / (name + ".json"), kDir);
}

constexpr RateLimiterPolicy kFast{0, 0, 0};

struct Served {
    explicit Served(const pipeline::RecordedChain& rec, ServerOptions opts = {})
        : server(FixtureStore::from_text(chain::export_snapshot(rec.state)), std::move(opts)) {
        server.start();
    }
    Server server;
};

Json q(const FixtureStore& s, std::map<std::string, std::string> p) { return s.query(p); }

}  // namespace

TEST(fixture, malformed_line_is_reported) {
    const auto rec = record("minilotto");
    std::istringstream in(chain::export_snapshot(rec.state));
    std::string text, line;
    for (int n = 1; std::getline(in, line); ++n) text += (n == 7 ? std::string("{\"kind\": \"tx\", oops") : line) + "\n";
    try {
        FixtureStore::from_text(text);
        FAIL() << "expected FixtureError";
    } catch (const FixtureError& e) {
        EXPECT_EQ(e.line(), 7u);
        EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
    }
}

TEST(fixture, minilotto_queries) {
    const auto rec = record("minilotto");
    const auto store = FixtureStore::from_text(chain::export_snapshot(rec.state));
    const auto lotto = rec.aliases.at("lotto").hex();
    const auto list = q(store, {{"module", "account"}, {"action", "txlist"}, {"address", lotto}});
    EXPECT_EQ(list.at("status"), "1");
    EXPECT_EQ(list.at("result").size(), 27u);
    EXPECT_EQ(q(store, {{"module", "account"}, {"action", "txlist"}, {"address", lotto}, {"limit", "5"}}).at("result").size(), 5u);
    const auto unknown = q(store, {{"module", "account"}, {"action", "txlist"}, {"address", derive_address("nobody", 0).hex()}});
    EXPECT_EQ(unknown.at("status"), "0");
    EXPECT_TRUE(unknown.at("result").empty());
    const auto src = q(store, {{"module", "contract"}, {"action", "getsourcecode"}, {"address", lotto}});
    EXPECT_EQ(src.at("result").at("contract_name"), "MiniLotto");
    EXPECT_FALSE(src.at("result").at("created_internal").get<bool>());
    EXPECT_EQ(q(store, {{"module", "nope"}, {"action", "x"}}).at("message"), "NOTOK");
}

TEST(client, round_trip_matches_chain) {
    for (const auto& [name, alias] : std::vector<std::pair<std::string, std::string>>{
             {"minilotto", "lotto"}, {"wallie", "wallie"}, {"proxy", "proxyA"}, {"ledger", "ledger"}}) {
        SCOPED_TRACE(name);
        const auto rec = record(name);
        Served srv{rec};
        const Address addr = rec.aliases.at(alias);
        VirtualClock clock;
        ExplorerClient client{srv.server.url(), kFast, clock};
        const auto b = fetch_bundle(client, addr, 1000);
        EXPECT_FALSE(b.partial);
        EXPECT_TRUE(b.clamped);

        std::vector<chain::TxRecord> expected;
        std::vector<chain::EventRecord> logs;
        for (const auto& tx : rec.state.transactions()) {
            if (tx.to != addr) continue;
            const auto& r = *rec.state.receipt(tx.hash);
            expected.push_back({tx, r, rec.state.blocks().at(r.block_number).timestamp});
            for (const auto& e : r.events) {
                if (e.emitter == addr) logs.push_back(e);
            }
        }
        ASSERT_EQ(b.transactions.size(), expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            EXPECT_EQ(b.transactions[i].tx, expected[i].tx) << i;
            EXPECT_EQ(b.transactions[i].timestamp, expected[i].timestamp);
            auto want = expected[i].receipt;
            std::erase_if(want.events, [&](const chain::EventRecord& e) { return e.emitter != addr; });
            EXPECT_EQ(b.transactions[i].receipt, want) << i;
        }
        EXPECT_EQ(b.event_logs, logs);
        EXPECT_FALSE(b.balances.empty());
        for (const auto& [key, value] : b.balances) EXPECT_EQ(value, rec.state.balance_at(key.first, key.second));
        const auto& c = rec.state.contracts().at(addr);
        EXPECT_EQ(b.source, c.source);
        EXPECT_EQ(b.creation.tx_hash, c.creation_tx);
        EXPECT_EQ(b.creation.from, c.creator);
        EXPECT_EQ(b.creation.args, c.constructor_args);
        EXPECT_EQ(chain::interface_to_json(b.iface), chain::interface_to_json(rec.state.account(addr)->code->iface));
    }
}

TEST(client, clamps_T) {
    const auto rec = record("minilotto");
    Served srv{rec};
    VirtualClock clock;
    ExplorerClient client{srv.server.url(), kFast, clock};
    const auto b = fetch_bundle(client, rec.aliases.at("lotto"), 50);
    EXPECT_EQ(b.T(), 27u);
    EXPECT_EQ(b.requested_T, 50u);
    EXPECT_TRUE(b.clamped);
    const auto b10 = fetch_bundle(client, rec.aliases.at("lotto"), 10);
    EXPECT_EQ(b10.T(), 10u);
    EXPECT_FALSE(b10.clamped);
    for (const auto& e : b10.event_logs) {
        EXPECT_TRUE(std::any_of(b10.transactions.begin(), b10.transactions.end(),
                                [&](const auto& r) { return r.tx.hash == e.tx_hash; }));
    }
}

TEST(client, internal_creation_found_via_trace) {
    const auto rec = record("factory");
    Served srv{rec};
    VirtualClock clock;
    ExplorerClient client{srv.server.url(), kFast, clock};
    const Address congress = rec.aliases.at("congress");
    const auto b = fetch_bundle(client, congress, 50);
    EXPECT_TRUE(b.creation.internal);
    EXPECT_EQ(b.creation.from, rec.aliases.at("factory"));
    ASSERT_EQ(b.creation.args.size(), 2u);
    EXPECT_EQ(b.creation.args[0], chain::Value::address(pipeline::historic_eoa(1)));
    EXPECT_EQ(b.contract_name, "Congress");
    EXPECT_GT(b.T(), 0u);
}

TEST(client, incoming_internal_transactions) {
    const auto rec = record("proxy");
    Served srv{rec};
    VirtualClock clock;
    ExplorerClient client{srv.server.url(), kFast, clock};
    const auto b = fetch_bundle(client, rec.aliases.at("server"), 50);
    EXPECT_EQ(b.T(), 0u);
    EXPECT_EQ(b.incoming_internal.size(), 5u);
}

TEST(rate_limiter, gaps_and_pauses_on_virtual_clock) {
    VirtualClock clock;
    const RateLimiterPolicy policy{350, 5, 1000};
    RateLimiter limiter{policy, clock};
    std::vector<std::uint64_t> t;
    for (int i = 0; i < 23; ++i) {
        t.push_back(limiter.acquire());
        clock.advance(static_cast<std::uint64_t>(i % 3) * 100);  // caller work between requests
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_GE(t[i] - t[i - 1], policy.min_interval_ms) << i;
        if (i % policy.pause_every == 0) {
            EXPECT_GE(t[i] - t[i - 1], policy.pause_ms) << i;
        }
    }
}

TEST(rate_limiter, client_requests_are_spaced) {
    const auto rec = record("wallie");
    Served srv{rec};
    VirtualClock clock;
    const RateLimiterPolicy policy{350, 5, 1000};
    ExplorerClient client{srv.server.url(), policy, clock};
    fetch_bundle(client, rec.aliases.at("wallie"), 50);
    const auto& t = client.request_times();
    ASSERT_GT(t.size(), 10u);
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_GE(t[i] - t[i - 1], policy.min_interval_ms);
        if (i % policy.pause_every == 0) {
            EXPECT_GE(t[i] - t[i - 1], policy.pause_ms);
        }
    }
}

TEST(rate_limiter, policy_from_env) {
    setenv("EXPLORER_MIN_INTERVAL_MS", "12", 1);
    const auto p = RateLimiterPolicy::from_env();
    unsetenv("EXPLORER_MIN_INTERVAL_MS");
    EXPECT_EQ(p.min_interval_ms, 12u);
    EXPECT_EQ(p.pause_every, 5u);
    EXPECT_EQ(p.pause_ms, 1000u);
}

TEST(client, network_errors_retry_then_surface) {
    int port = 0;
    {
        Served srv{record("wallie")};
        port = srv.server.port();
    }
    VirtualClock clock;
    ExplorerClient client{"http://127.0.0.1:" + std::to_string(port), kFast, clock, RetryPolicy{3, 100}};
    EXPECT_THROW(client.query({{"module", "account"}, {"action", "txlist"}}), ExplorerError);
    ASSERT_EQ(client.request_times().size(), 4u);
    EXPECT_EQ(client.request_times().back(), 100u + 200u + 400u);
}

TEST(client, truncated_response_marks_bundle_partial) {
    const auto rec = record("minilotto");
    ServerOptions opts;
    opts.truncate_actions = {"getLogs"};
    Served srv{rec, opts};
    VirtualClock clock;
    ExplorerClient client{srv.server.url(), kFast, clock};
    const auto b = fetch_bundle(client, rec.aliases.at("lotto"), 27);
    EXPECT_TRUE(b.partial);
    ASSERT_EQ(b.partial_reasons.size(), 1u);
    EXPECT_NE(b.partial_reasons[0].find("getLogs"), std::string::npos);
    EXPECT_TRUE(b.event_logs.empty());
    EXPECT_EQ(b.T(), 27u);
}

TEST(bundle, json_round_trip_and_prefix) {
    const auto rec = record("factory");
    Served srv{rec};
    VirtualClock clock;
    ExplorerClient client{srv.server.url(), kFast, clock};
    const auto b = fetch_bundle(client, rec.aliases.at("factory"), 50);
    const auto back = bundle_from_json(bundle_to_json(b));
    EXPECT_EQ(bundle_to_json(back).dump(), bundle_to_json(b).dump());
    EXPECT_EQ(back.internal_trace, b.internal_trace);
    const auto p = b.prefix(1);
    EXPECT_EQ(p.T(), 1u);
    EXPECT_EQ(p.internal_trace.size(), 1u);
}
