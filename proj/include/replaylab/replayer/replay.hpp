// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include <replaylab/chain/world_state.hpp>
#include <replaylab/scriptgen/plan.hpp>

namespace replaylab::replayer {

using chain::Json;

//! Timestamp assignment for the replayed steps.
struct Schedule {
    enum class Kind { kHistoric, kSequential, kOffset, kExplicit };

    Kind kind{Kind::kHistoric};
    std::uint64_t start{0};
    std::uint64_t stride{0};
    std::int64_t delta{0};
    std::vector<std::uint64_t> list;

    static Schedule historic() { return {}; }
    static Schedule sequential(std::uint64_t start, std::uint64_t stride) { return {Kind::kSequential, start, stride, 0, {}}; }
    static Schedule offset(std::int64_t delta) { return {Kind::kOffset, 0, 0, delta, {}}; }
    static Schedule explicit_list(std::vector<std::uint64_t> ts) { return {Kind::kExplicit, 0, 0, 0, std::move(ts)}; }
    //! "historic", "sequential:<start>:<stride>", "offset:<d>"; explicit lists come from files.
    static Schedule parse(const std::string& text);

    //! Timestamp of tx step `index` whose historic timestamp is `historic_ts`.
    [[nodiscard]] std::uint64_t at(std::size_t index, std::uint64_t historic_ts) const;
    //! Filename-safe label, e.g. "sequential-451-500".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct RunConfig {
    std::size_t runs{5};
    Schedule schedule;
    //! Per-run replacements for `schedule`, keyed by run index.
    std::map<std::size_t, Schedule> run_schedules;
    Word gas_price{0};
    Word endowment{word_from_string("1000000000000000000000000")};

    [[nodiscard]] const Schedule& schedule_for(std::size_t run) const;
    //! Throws std::invalid_argument on R = 0 or an explicit list shorter than `steps`.
    void validate(std::size_t steps) const;
};

struct StepOutcome {
    std::size_t index{0};
    bool executed{false};
    bool forced{false};
    chain::Status status{chain::Status::kFailed};
    std::optional<std::uint64_t> gas_used;  // absent for rejected forced steps
    std::vector<chain::EventRecord> events;
    std::map<std::size_t, Word> balances;  // tracked map entry -> balance after the step
    std::optional<std::string> failure_reason;
    std::set<std::uint32_t> executed_instructions;  // contract under test only; not serialized
    //! Executed path: code address -> instruction index -> count. Not serialized.
    std::map<Address, std::map<std::uint32_t, std::uint64_t>> path;

    friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

struct GetterOutcome {
    std::string method;
    std::vector<chain::Value> args;
    std::optional<std::vector<chain::Value>> result;
    std::optional<std::string> error;

    friend bool operator==(const GetterOutcome&, const GetterOutcome&) = default;
};

struct ReplayRun {
    std::size_t run{0};
    std::string schedule;
    bool deploy_ok{false};
    std::optional<std::string> deploy_error;
    Address deployed;
    std::vector<StepOutcome> outcomes;
    std::vector<GetterOutcome> getters;
    //! Decoded address casts that name neither an account nor a replay-side map entry.
    std::set<Address> unmapped_casts;

    friend bool operator==(const ReplayRun&, const ReplayRun&) = default;
};

//! Map entries whose balances are observed after every step.
std::vector<std::size_t> tracked_accounts(const scriptgen::TestPlan& plan);

ReplayRun replay(const scriptgen::TestPlan& plan, const RunConfig& config, std::size_t run_index);
//! All R runs, concurrently; results ordered by run index.
std::vector<ReplayRun> replay_all(const scriptgen::TestPlan& plan, const RunConfig& config);

//! Runs the plan once and returns the historic addresses revealed by runtime casts.
std::set<Address> discovery_pass(const scriptgen::TestPlan& plan, const RunConfig& config = {});

using Ratio = boost::rational<std::uint64_t>;

enum class Category { kFailed, kIntermediate, kPerfect };
std::string category_name(Category c);

struct AccuracyResult {
    enum class Kind { kStatus, kEvent };

    Kind kind{Kind::kStatus};
    std::size_t t{0};
    std::size_t T{0};
    Category category{Category::kFailed};

    //! t/T; an empty plan counts as 1.
    [[nodiscard]] Ratio ratio() const { return T == 0 ? Ratio{1} : Ratio{t, T}; }
};

AccuracyResult status_accuracy(const ReplayRun& run, const scriptgen::TestPlan& plan);
AccuracyResult event_accuracy(const ReplayRun& run, const scriptgen::TestPlan& plan);
bool status_agrees(const StepOutcome& o, const scriptgen::TxStep& s);
bool events_agree(const StepOutcome& o, const scriptgen::TxStep& s, const scriptgen::AddressMap& map, const Address& deployed);

//! Value seen on the replay chain, rewritten to its historic counterpart where it names a map entry.
chain::Value historic_value(const scriptgen::AddressMap& map, const Address& deployed, const chain::Value& v);

//! T rows by R columns; absent cells hold nullopt.
struct OutputMatrix {
    std::string name;
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<std::optional<Word>> cells;  // row-major

    OutputMatrix() = default;
    OutputMatrix(std::string n, std::size_t r, std::size_t c) : name(std::move(n)), rows(r), cols(c), cells(r * c) {}
    [[nodiscard]] const std::optional<Word>& at(std::size_t row, std::size_t col) const { return cells.at(row * cols + col); }
    std::optional<Word>& at(std::size_t row, std::size_t col) { return cells.at(row * cols + col); }

    friend bool operator==(const OutputMatrix&, const OutputMatrix&) = default;
};

//! Status cells encode failed = 0, out_of_gas = 1, success = 2.
Word status_code(chain::Status s);

//! Matrices "gas_used", "status", "event:<Name>.<param>" and "balance:<ref>". An empty
//! `tracked` list selects every output.
std::vector<OutputMatrix> collect_matrices(const std::vector<ReplayRun>& runs, const scriptgen::TestPlan& plan,
                                           const std::vector<std::string>& tracked = {});

//! One record per line: the deploy record, each step, each getter.
std::string run_to_jsonl(const ReplayRun& run, const scriptgen::TestPlan& plan);

}  // namespace replaylab::replayer
