// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <replaylab/replayer/replay.hpp>

namespace replaylab::analytics {

using replayer::Category;

struct FlagVector {
    bool uses_special_vars{false};
    bool has_contract_casts{false};
    bool called_by_other_contracts{false};
    bool has_residual_adhoc_addresses{false};

    [[nodiscard]] bool get(std::size_t i) const;
    friend bool operator==(const FlagVector&, const FlagVector&) = default;
};

inline constexpr std::array<const char*, 4> kFlagNames{"special_vars", "contract_casts", "called_by_contracts", "adhoc_addresses"};

FlagVector flag_vector(const mcl::StaticFlags& flags, const explorer::HistoricBundle& bundle, const std::set<Address>& discovered);
//! Static flags of the bundle's contract; all false when the source does not parse.
mcl::StaticFlags bundle_static_flags(const explorer::HistoricBundle& bundle);

//! Pearson statistic over a contingency table with all-zero rows and columns dropped.
struct ChiSquare {
    double statistic{0};
    unsigned dof{0};
    std::optional<double> p_value;  // absent when dof = 0
};

ChiSquare chi_square(const std::vector<std::vector<std::uint64_t>>& counts);
//! Upper tail of the chi-square distribution: Q(dof/2, x/2).
double chi_square_p_value(double statistic, unsigned dof);

struct CrossTable {
    std::string flag;
    std::string accuracy;  // "status" or "event"
    std::array<std::array<std::uint64_t, 3>, 2> counts{};  // rows no/yes; columns failed/intermediate/perfect
    ChiSquare chi;

    [[nodiscard]] std::uint64_t row_total(std::size_t row) const;
    //! Share of perfect contracts in the row; absent for an empty row.
    [[nodiscard]] std::optional<double> perfect_share(std::size_t row) const;
};

CrossTable cross_table(const std::vector<std::pair<bool, Category>>& observations);

struct StatusPairMatrix {
    //! historic status x replay status, axes failed / out_of_gas / success
    std::array<std::array<std::uint64_t, 3>, 3> counts{};

    void add(chain::Status historic, chain::Status replayed);
    [[nodiscard]] std::uint64_t total() const;
    [[nodiscard]] std::uint64_t diagonal() const;
};

//! Every executed step of every run is counted, including steps after the accuracy cutoff.
StatusPairMatrix status_pair_matrix(const std::vector<std::pair<const scriptgen::TestPlan*, const replayer::ReplayRun*>>& runs);

struct CoverageReport {
    std::string contract;
    std::size_t executed{0};
    std::size_t instruction_count{0};
    double coverage_pct{0};
};

CoverageReport coverage(const std::vector<std::set<std::uint32_t>>& per_tx, const mcl::CompiledContract& code);

using CallerIndex = std::map<Address, std::vector<std::pair<Address, std::string>>>;
//! Inbound internal call edges per callee, each internal transaction counted once.
CallerIndex caller_index(const std::vector<explorer::HistoricBundle>& bundles);

// ---------------------------------------------------------------------------
// Per-contract evaluation

struct EvalOptions {
    std::uint64_t seed{0};
    std::size_t address_cap{scriptgen::kDefaultAddressCap};
    replayer::RunConfig run;
    bool allow_partial{false};
};

struct Evaluation {
    Address contract;
    std::string name;
    FlagVector flags;
    std::set<Address> discovered;
    scriptgen::TestPlan plan;
    std::vector<replayer::ReplayRun> runs;
    //! From run 0 under the historic schedule.
    replayer::AccuracyResult status;
    replayer::AccuracyResult event;
    std::optional<CoverageReport> coverage;
};

//! Plan generation with one discovery pass, then the configured replay runs.
Evaluation evaluate(const explorer::HistoricBundle& bundle, const EvalOptions& options);

struct SensitivityPoint {
    std::size_t T{0};
    std::size_t contracts{0};
    std::size_t perfect_status{0};
    std::size_t perfect_event{0};

    [[nodiscard]] double status_share() const { return contracts ? double(perfect_status) / double(contracts) : 0.0; }
    [[nodiscard]] double event_share() const { return contracts ? double(perfect_event) / double(contracts) : 0.0; }
};

//! Plans regenerated on each bundle prefix; T values beyond a bundle's length are clamped.
std::vector<SensitivityPoint> sensitivity_T(const std::vector<explorer::HistoricBundle>& bundles, const std::vector<std::size_t>& Ts,
                                            const EvalOptions& options);

struct CorpusReport {
    std::vector<Evaluation> evaluations;  // sorted by contract address
    std::vector<std::pair<Address, std::string>> failures;
    std::vector<CrossTable> tables;  // 4 flags x {status, event}
    StatusPairMatrix status_pairs;
    std::vector<SensitivityPoint> sensitivity;
    CallerIndex callers;
};

CorpusReport analyze_corpus(const std::vector<explorer::HistoricBundle>& bundles, const std::vector<std::size_t>& Ts,
                            const EvalOptions& options);

std::string cross_tables_csv(const std::vector<CrossTable>& tables);
std::string status_pairs_csv(const StatusPairMatrix& m);
std::string sensitivity_csv(const std::vector<SensitivityPoint>& curve);
std::string coverage_csv(const std::vector<Evaluation>& evaluations);
std::string flags_csv(const std::vector<Evaluation>& evaluations);
std::string callers_csv(const CallerIndex& index);
//! Plain-text summary: per-contract results, the status pair table and the cross tables.
std::string text_report(const CorpusReport& report);

}  // namespace replaylab::analytics
