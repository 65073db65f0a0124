// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>

#include <gtest/gtest.h>

#include <harness.hpp>
#include <replaylab/pipeline/pipeline.hpp>
#include <replaylab/viz/viz.hpp>

using namespace replaylab;
using namespace replaylab::pipeline;
using replaylab::harness::record;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("replaylab-pipeline-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& k) -> std::optional<std::string> {
        const auto it = vars.find(k);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

PipelineConfig fast(const harness::Served& srv, const fs::path& out) {
    PipelineConfig cfg;
    cfg.explorer_url = srv.server.url();
    cfg.rate = harness::kFast;
    cfg.out = out;
    return cfg;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
    return out;
}

struct Lotto {
    Lotto() : rec(record("minilotto")), srv(rec), address(rec.aliases.at("lotto")) {}
    pipeline::RecordedChain rec;
    harness::Served srv;
    Address address;
};

Lotto& lotto() {
    static Lotto l;
    return l;
}

}  // namespace

TEST(config, precedence) {
    const auto dir = scratch("config");
    write_file(dir / "cfg.json", R"({"explorer_url": "http://file", "runs": 3, "schedule": "offset:60"})");

    EXPECT_EQ(load_config(std::nullopt, env_of({})).explorer_url, PipelineConfig{}.explorer_url);
    EXPECT_EQ(load_config(std::nullopt, env_of({})).T, 50u);
    EXPECT_EQ(load_config(std::nullopt, env_of({{"EXPLORER_URL", "http://env"}})).explorer_url, "http://env");

    auto cfg = load_config(dir / "cfg.json", env_of({{"EXPLORER_URL", "http://env"}, {"EXPLORER_MIN_INTERVAL_MS", "7"}}));
    EXPECT_EQ(cfg.explorer_url, "http://file");
    EXPECT_EQ(cfg.rate.min_interval_ms, 7u);
    EXPECT_EQ(cfg.runs, 3u);
    EXPECT_EQ(cfg.schedule, replayer::Schedule::offset(60));

    write_file(dir / "bad.json", R"({"runz": 3})");
    EXPECT_THROW(load_config(dir / "bad.json", env_of({})), std::invalid_argument);
    EXPECT_THROW(load_config(std::nullopt, env_of({{"EXPLORER_PAUSE_MS", "-1"}})), std::invalid_argument);

    PipelineConfig zero;
    zero.runs = 0;
    EXPECT_THROW(zero.validate(), std::invalid_argument);
    zero.runs = 1;
    zero.T = 0;
    EXPECT_THROW(zero.validate(), std::invalid_argument);
}

TEST(config, schedule_files) {
    const auto dir = scratch("sched");
    write_file(dir / "a.json", "[5, 6, 9]");
    write_file(dir / "b.txt", "5\n6 9\n");
    write_file(dir / "c.txt", "\n");
    EXPECT_EQ(parse_schedule("file:a.json", dir), replayer::Schedule::explicit_list({5, 6, 9}));
    EXPECT_EQ(parse_schedule("file:" + (dir / "b.txt").string()), replayer::Schedule::explicit_list({5, 6, 9}));
    EXPECT_THROW(parse_schedule("file:c.txt", dir), std::invalid_argument);
    EXPECT_EQ(parse_schedule("sequential:1:1"), replayer::Schedule::sequential(1, 1));
    EXPECT_THROW(parse_schedule("weekly"), std::invalid_argument);
}

TEST(artifacts, names_are_sanitized) {
    EXPECT_EQ(artifact_name("MiniLotto", "event:NewPlay.won", "sequential-451-500"), "MiniLotto_event-NewPlay.won_sequential-451-500");
    EXPECT_EQ(artifact_name("a b", "balance:3", "historic"), "a-b_balance-3_historic");
}

TEST(record, stream_is_deterministic) {
    const auto dir = scratch("record");
    const auto scenario = harness::kFixtureDir / "scenarios" / "minilotto.json";
    const auto a = record_fixture(scenario, harness::kFixtureDir, dir / "aliases.json");
    EXPECT_EQ(a, record_fixture(scenario, harness::kFixtureDir));
    const auto aliases = chain::Json::parse(read_file(dir / "aliases.json"));
    const auto store = explorer::FixtureStore::from_text(a);
    const auto txs = store.query({{"module", "account"}, {"action", "txlist"}, {"address", aliases.at("lotto")}, {"limit", "1000"}});
    EXPECT_EQ(txs.at("result").size(), 27u);

    write_file(dir / "empty.json", R"({"name": "empty", "accounts": 0, "steps": []})");
    EXPECT_EQ(explorer::FixtureStore::from_text(record_fixture(dir / "empty.json", harness::kFixtureDir)).contract_count(), 0u);
}

TEST(pipeline, closed_loop_minilotto) {
    auto& l = lotto();
    const auto out = scratch("lotto");
    const auto res = run_pipeline(fast(l.srv, out), l.address);
    ASSERT_FALSE(res.failed_stage) << res.error;
    EXPECT_EQ(res.exit_code, 0);
    const auto acc = chain::Json::parse(read_file(out / "accuracy.json"));
    EXPECT_EQ(acc.at("historic").at("status"), (chain::Json{{"t", 27}, {"T", 27}, {"category", "perfect"}}));
    EXPECT_EQ(acc.at("historic").at("event").at("t"), 27);
    EXPECT_EQ(acc.at("runs").size(), 5u);
    for (const char* f : {"bundle.json", "plan.json", "genesis.json", "testbox.tar", "discovery.json", "contracts/MiniLotto.mcl",
                          "summary.txt", "runs/run-0.jsonl", "runs/run-4.jsonl", "matrices/MiniLotto_gas_used_historic.csv",
                          "matrices/MiniLotto_gas_used_historic.svg", "matrices/MiniLotto_event-NewPlay.won_historic.svg",
                          "figures/MiniLotto_balances_historic.svg"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    // the written plan replays on its own
    const auto plan = scriptgen::plan_from_json(chain::Json::parse(read_file(out / "plan.json")), read_file(out / "contracts/MiniLotto.mcl"));
    EXPECT_EQ(plan.T(), 27u);
}

TEST(pipeline, what_if_schedule_changes_events) {
    auto& l = lotto();
    const auto hist = scratch("lotto-hist");
    const auto seq = scratch("lotto-seq");
    auto cfg = fast(l.srv, hist);
    cfg.runs = 1;
    ASSERT_EQ(run_pipeline(cfg, l.address).exit_code, 0);
    cfg.out = seq;
    cfg.schedule = replayer::Schedule::sequential(1, 1);
    const auto res = run_pipeline(cfg, l.address);
    EXPECT_EQ(res.exit_code, 0);  // keyed to the historic run 0
    EXPECT_TRUE(fs::exists(seq / "runs/historic-0.jsonl"));
    const auto a = viz::parse_csv(read_file(hist / "matrices/MiniLotto_event-NewPlay.number_historic.csv"), "n");
    const auto b = viz::parse_csv(read_file(seq / "matrices/MiniLotto_event-NewPlay.number_sequential-1-1.csv"), "n");
    EXPECT_NE(a, b);
}

TEST(pipeline, missing_dependency_exits_nonzero) {
    const auto rec = record("sale");
    harness::Served srv{rec};
    const auto out = scratch("sale");
    auto cfg = fast(srv, out);
    cfg.runs = 1;
    const auto res = run_pipeline(cfg, rec.aliases.at("sale"));
    ASSERT_FALSE(res.failed_stage) << res.error;
    EXPECT_NE(res.exit_code, 0);
    EXPECT_EQ(res.status_category, replayer::Category::kFailed);
    const auto acc = chain::Json::parse(read_file(out / "accuracy.json"));
    EXPECT_EQ(acc.at("historic").at("status").at("category"), "failed");
    EXPECT_FALSE(acc.at("historic").at("deploy_ok").get<bool>());
}

TEST(pipeline, replay_failure_keeps_bundle) {
    auto& l = lotto();
    const auto out = scratch("lotto-broken");
    auto cfg = fast(l.srv, out);
    cfg.schedule = replayer::Schedule::explicit_list({1, 2, 3});  // shorter than the 27 steps
    const auto res = run_pipeline(cfg, l.address);
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_EQ(res.failed_stage, "replay");
    EXPECT_NE(res.error.find("replay"), std::string::npos);
    const auto fresh = harness::fetch(l.srv, l.address, 50);
    EXPECT_EQ(read_file(out / "bundle.json"), explorer::bundle_to_json(fresh).dump(1) + "\n");
    EXPECT_TRUE(fs::exists(out / "plan.json"));
    EXPECT_FALSE(fs::exists(out / "accuracy.json"));
    for (const auto& e : fs::recursive_directory_iterator(out)) EXPECT_NE(e.path().extension(), ".partial");

    const auto missing = run_pipeline(fast(l.srv, scratch("lotto-missing")), derive_address("nowhere", 0));
    EXPECT_EQ(missing.failed_stage, "fetch");
}

TEST(pipeline, byte_identical_trees) {
    auto& l = lotto();
    auto cfg = fast(l.srv, scratch("det-a"));
    cfg.runs = 2;
    ASSERT_EQ(run_pipeline(cfg, l.address).exit_code, 0);
    const auto a = cfg.out;
    cfg.out = scratch("det-b");
    ASSERT_EQ(run_pipeline(cfg, l.address).exit_code, 0);
    const auto ta = tree(a);
    EXPECT_GT(ta.size(), 10u);
    EXPECT_EQ(ta, tree(cfg.out));
}

TEST(corpus, report_files) {
    const auto lotto_rec = record("minilotto");
    harness::Served s1{lotto_rec};
    auto cfg = fast(s1, scratch("corpus"));
    cfg.runs = 1;
    cfg.sensitivity_Ts = {1, 5};
    const auto r1 = run_corpus(cfg, {lotto_rec.aliases.at("lotto"), derive_address("nowhere", 1)});
    EXPECT_EQ(r1.report.evaluations.size(), 1u);
    ASSERT_EQ(r1.fetch_failures.size(), 1u);
    EXPECT_EQ(r1.report.tables.size(), 8u);
    for (const char* f : {"flags.csv", "cross_tables.csv", "status_pairs.csv", "sensitivity.csv", "coverage.csv", "callers.csv", "report.txt"}) {
        EXPECT_TRUE(fs::exists(cfg.out / f)) << f;
    }
    EXPECT_NE(read_file(cfg.out / "report.txt").find("could not evaluate"), std::string::npos);
    EXPECT_TRUE(fs::exists(cfg.out / "bundles" / lotto_rec.aliases.at("lotto").hex() / "bundle.json"));
}
