// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/analytics/analytics.hpp>
#include <replaylab/explorer/client.hpp>
#include <replaylab/replayer/replay.hpp>

namespace replaylab::pipeline {

namespace fs = std::filesystem;

//! A pipeline stage ("fetch", "gen", "replay", "report") that did not complete.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& what);
    [[nodiscard]] const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct PipelineConfig {
    std::string explorer_url{"http://127.0.0.1:8080"};
    std::size_t T{50};
    std::size_t runs{5};
    std::uint64_t seed{0};
    std::size_t address_cap{scriptgen::kDefaultAddressCap};
    replayer::Schedule schedule;
    Word gas_price{0};
    fs::path out{"replaylab-out"};
    explorer::RateLimiterPolicy rate;
    //! Sensitivity grid used by corpus runs.
    std::vector<std::size_t> sensitivity_Ts{1, 5, 10, 25, 50};

    //! Throws std::invalid_argument on a zero bound or an empty explicit schedule.
    void validate() const;
    [[nodiscard]] replayer::RunConfig run_config() const;
    [[nodiscard]] analytics::EvalOptions eval_options() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
//! Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

//! EXPLORER_URL and the EXPLORER_* rate limiter variables.
void apply_env(PipelineConfig& cfg, const EnvLookup& env);
// Keys: explorer_url, tx_limit, runs, seed, address_cap, schedule, gas_price, out,
// min_interval_ms, pause_every, pause_ms, sensitivity_T. Unknown keys are rejected.
void apply_config_json(PipelineConfig& cfg, const chain::Json& j, const fs::path& base_dir = {});
//! Defaults, then env, then the optional file. Command-line flags are applied by the caller.
PipelineConfig load_config(const std::optional<fs::path>& file, const EnvLookup& env);

//! historic | sequential:<start>:<stride> | offset:<d> | file:<path>. A schedule file holds a
//! JSON array of timestamps or whitespace-separated decimals; relative paths resolve against base_dir.
replayer::Schedule parse_schedule(const std::string& text, const fs::path& base_dir = {});

//! "<contract>_<output>_<schedule>" with every character outside [A-Za-z0-9._-] replaced by '-'.
std::string artifact_name(const std::string& contract, const std::string& output, const std::string& schedule);

//! Writes through a temporary sibling and a rename, so readers never see a half-written file.
void write_file(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

// Stages. Each writes its artifacts under `dir` and throws StageError on failure.

//! Scenario -> fixture stream (chain snapshot); aliases are written when requested.
std::string record_fixture(const fs::path& scenario, const fs::path& source_dir, const std::optional<fs::path>& aliases_out = {});

//! bundle.json
explorer::HistoricBundle stage_fetch(const PipelineConfig& cfg, const Address& contract, const fs::path& dir);

struct Generated {
    scriptgen::TestPlan plan;
    std::set<Address> discovered;
};
//! plan.json, contracts/<Name>.mcl, genesis.json, testbox.tar, discovery.json
Generated stage_gen(const PipelineConfig& cfg, const explorer::HistoricBundle& bundle, const fs::path& dir);

struct Replayed {
    std::vector<replayer::ReplayRun> runs;
    //! Run 0 under the historic schedule; the exit status is keyed to it.
    replayer::ReplayRun historic;
};
//! runs/run-<k>.jsonl
Replayed stage_replay(const PipelineConfig& cfg, const scriptgen::TestPlan& plan, const fs::path& dir);

//! accuracy.json, matrices/<name>.{csv,svg}, figures/<name>.svg, summary.txt. Returns the
//! historic run-0 status category.
replayer::Category stage_report(const PipelineConfig& cfg, const scriptgen::TestPlan& plan, const Replayed& replayed,
                                const std::optional<explorer::HistoricBundle>& bundle, const std::set<Address>& discovered,
                                const fs::path& dir);

struct PipelineResult {
    //! 0: run-0 historic status perfect; 1: not perfect; 2: a stage failed.
    int exit_code{2};
    std::optional<std::string> failed_stage;
    std::string error;
    std::optional<replayer::Category> status_category;
};

//! fetch -> gen -> replay -> report into cfg.out. Artifacts of completed stages are kept on failure.
PipelineResult run_pipeline(const PipelineConfig& cfg, const Address& contract);

struct CorpusResult {
    analytics::CorpusReport report;
    //! Contracts whose fetch failed; their evaluation is skipped.
    std::vector<std::pair<Address, std::string>> fetch_failures;
};

//! bundles/<address>/bundle.json plus the report files of write_corpus_report.
CorpusResult run_corpus(const PipelineConfig& cfg, const std::vector<Address>& contracts);
//! flags.csv, cross_tables.csv, status_pairs.csv, sensitivity.csv, coverage.csv, callers.csv, report.txt
void write_corpus_report(const analytics::CorpusReport& report, const fs::path& dir);

}  // namespace replaylab::pipeline
