// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/analytics/analytics.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace replaylab::analytics {

using replayer::AccuracyResult;
using replayer::ReplayRun;
using scriptgen::TestPlan;

bool FlagVector::get(std::size_t i) const {
    switch (i) {
        case 0:
            return uses_special_vars;
        case 1:
            return has_contract_casts;
        case 2:
            return called_by_other_contracts;
        case 3:
            return has_residual_adhoc_addresses;
        default:
            throw std::out_of_range("flag index " + std::to_string(i));
    }
}

mcl::StaticFlags bundle_static_flags(const explorer::HistoricBundle& bundle) {
    try {
        return mcl::static_flags(mcl::parse(bundle.source), bundle.contract_name);
    } catch (const std::exception&) {
        return {};
    }
}

FlagVector flag_vector(const mcl::StaticFlags& flags, const explorer::HistoricBundle& bundle, const std::set<Address>& discovered) {
    return {flags.uses_special_vars, flags.has_contract_casts, !bundle.incoming_internal.empty(), !discovered.empty()};
}

// ---------------------------------------------------------------------------
// Statistics

double chi_square_p_value(double statistic, unsigned dof) {
    if (dof == 0) throw std::invalid_argument("chi-square p-value needs at least one degree of freedom");
    if (statistic <= 0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquare chi_square(const std::vector<std::vector<std::uint64_t>>& counts) {
    std::vector<std::size_t> rows, cols;
    const std::size_t ncols = counts.empty() ? 0 : counts[0].size();
    std::vector<double> row_sum(counts.size(), 0), col_sum(ncols, 0);
    double n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].size() != ncols) throw std::invalid_argument("ragged contingency table");
        for (std::size_t j = 0; j < ncols; ++j) {
            row_sum[i] += double(counts[i][j]);
            col_sum[j] += double(counts[i][j]);
            n += double(counts[i][j]);
        }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (row_sum[i] > 0) rows.push_back(i);
    }
    for (std::size_t j = 0; j < ncols; ++j) {
        if (col_sum[j] > 0) cols.push_back(j);
    }
    ChiSquare out;
    if (rows.size() < 2 || cols.size() < 2) return out;
    for (auto i : rows) {
        for (auto j : cols) {
            const double expected = row_sum[i] * col_sum[j] / n;
            const double d = double(counts[i][j]) - expected;
            out.statistic += d * d / expected;
        }
    }
    out.dof = static_cast<unsigned>((rows.size() - 1) * (cols.size() - 1));
    out.p_value = chi_square_p_value(out.statistic, out.dof);
    return out;
}

std::uint64_t CrossTable::row_total(std::size_t row) const {
    const auto& r = counts.at(row);
    return r[0] + r[1] + r[2];
}

std::optional<double> CrossTable::perfect_share(std::size_t row) const {
    const auto n = row_total(row);
    if (n == 0) return std::nullopt;
    return double(counts[row][2]) / double(n);
}

CrossTable cross_table(const std::vector<std::pair<bool, Category>>& observations) {
    if (observations.empty()) throw std::invalid_argument("cross table needs at least one observation");
    CrossTable t;
    for (const auto& [flag, cat] : observations) ++t.counts[flag ? 1 : 0][static_cast<std::size_t>(cat)];
    std::vector<std::vector<std::uint64_t>> m;
    for (const auto& r : t.counts) m.emplace_back(r.begin(), r.end());
    t.chi = chi_square(m);
    return t;
}

namespace {

    std::size_t status_axis(chain::Status s) {
        switch (s) {
            case chain::Status::kFailed:
                return 0;
            case chain::Status::kOutOfGas:
                return 1;
            default:
                return 2;
        }
    }

}  // namespace

void StatusPairMatrix::add(chain::Status historic, chain::Status replayed) { ++counts[status_axis(historic)][status_axis(replayed)]; }

std::uint64_t StatusPairMatrix::total() const {
    std::uint64_t n = 0;
    for (const auto& r : counts) {
        for (auto c : r) n += c;
    }
    return n;
}

std::uint64_t StatusPairMatrix::diagonal() const { return counts[0][0] + counts[1][1] + counts[2][2]; }

StatusPairMatrix status_pair_matrix(const std::vector<std::pair<const TestPlan*, const ReplayRun*>>& runs) {
    StatusPairMatrix m;
    for (const auto& [plan, run] : runs) {
        for (const auto& o : run->outcomes) {
            if (o.executed) m.add(plan->txs.at(o.index).expected_status, o.status);
        }
    }
    return m;
}

CoverageReport coverage(const std::vector<std::set<std::uint32_t>>& per_tx, const mcl::CompiledContract& code) {
    std::set<std::uint32_t> all;
    for (const auto& s : per_tx) all.insert(s.begin(), s.end());
    CoverageReport r{code.name, all.size(), code.instruction_count, 0.0};
    if (r.executed > r.instruction_count) throw std::logic_error("trace does not belong to " + code.name);
    if (r.instruction_count > 0) r.coverage_pct = 100.0 * double(r.executed) / double(r.instruction_count);
    return r;
}

CallerIndex caller_index(const std::vector<explorer::HistoricBundle>& bundles) {
    CallerIndex out;
    std::set<Hash32> seen;
    auto visit = [&](const chain::Transaction& it) {
        if (!it.to || !seen.insert(it.hash).second) return;
        out[*it.to].emplace_back(it.from, it.method);
    };
    for (const auto& b : bundles) {
        out.try_emplace(b.contract_address);
        for (const auto& it : b.incoming_internal) visit(it);
        for (const auto& rec : b.transactions) {
            for (const auto& it : rec.receipt.internal_txs) visit(it);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Evaluation evaluate(const explorer::HistoricBundle& bundle, const EvalOptions& options) {
    Evaluation ev;
    ev.contract = bundle.contract_address;
    ev.name = bundle.contract_name;
    const scriptgen::GenerateOptions gen{options.seed, options.allow_partial};
    const auto first = scriptgen::generate_plan(bundle, scriptgen::build_address_map(bundle, {}, options.address_cap), gen);
    replayer::RunConfig probe = options.run;
    probe.schedule = replayer::Schedule::historic();
    ev.discovered = replayer::discovery_pass(first, probe);
    ev.plan = scriptgen::generate_plan(
        bundle, scriptgen::build_address_map(bundle, {ev.discovered.begin(), ev.discovered.end()}, options.address_cap), gen);
    ev.flags = flag_vector(bundle_static_flags(bundle), bundle, ev.discovered);
    ev.runs = replayer::replay_all(ev.plan, options.run);

    const ReplayRun* canonical = &ev.runs.at(0);
    ReplayRun historic;
    if (options.run.schedule_for(0).kind != replayer::Schedule::Kind::kHistoric) {
        replayer::RunConfig h = options.run;
        h.schedule = replayer::Schedule::historic();
        h.run_schedules.clear();
        historic = replayer::replay(ev.plan, h, 0);
        canonical = &historic;
    }
    ev.status = replayer::status_accuracy(*canonical, ev.plan);
    ev.event = replayer::event_accuracy(*canonical, ev.plan);

    if (canonical->deploy_ok) {
        try {
            const auto code = mcl::compile_contract(mcl::parse(bundle.source), bundle.contract_name);
            std::vector<std::set<std::uint32_t>> per_tx;
            for (const auto& o : canonical->outcomes) per_tx.push_back(o.executed_instructions);
            ev.coverage = coverage(per_tx, code);
        } catch (const std::exception&) {
            // literal-linked sources compile only after translation; coverage is then not reported
        }
    }
    return ev;
}

std::vector<SensitivityPoint> sensitivity_T(const std::vector<explorer::HistoricBundle>& bundles, const std::vector<std::size_t>& Ts,
                                            const EvalOptions& options) {
    EvalOptions once = options;
    once.run.runs = 1;
    once.run.run_schedules.clear();
    once.run.schedule = replayer::Schedule::historic();
    std::vector<SensitivityPoint> curve;
    for (auto T : Ts) {
        SensitivityPoint p{T, 0, 0, 0};
        for (const auto& b : bundles) {
            try {
                const auto ev = evaluate(b.prefix(std::min(T, b.T())), once);
                p.perfect_status += ev.status.category == Category::kPerfect;
                p.perfect_event += ev.event.category == Category::kPerfect;
            } catch (const std::exception&) {
                // a contract that cannot be evaluated counts as not perfect
            }
            ++p.contracts;
        }
        curve.push_back(p);
    }
    return curve;
}

CorpusReport analyze_corpus(const std::vector<explorer::HistoricBundle>& bundles, const std::vector<std::size_t>& Ts,
                            const EvalOptions& options) {
    CorpusReport r;
    for (const auto& b : bundles) {
        try {
            r.evaluations.push_back(evaluate(b, options));
        } catch (const std::exception& e) {
            r.failures.emplace_back(b.contract_address, e.what());
        }
    }
    std::sort(r.evaluations.begin(), r.evaluations.end(), [](const Evaluation& a, const Evaluation& b) { return a.contract < b.contract; });
    std::sort(r.failures.begin(), r.failures.end());
    for (std::size_t f = 0; f < kFlagNames.size(); ++f) {
        for (const char* kind : {"status", "event"}) {
            std::vector<std::pair<bool, Category>> obs;
            for (const auto& ev : r.evaluations) {
                obs.emplace_back(ev.flags.get(f), std::string(kind) == "status" ? ev.status.category : ev.event.category);
            }
            if (obs.empty()) continue;
            CrossTable t = cross_table(obs);
            t.flag = kFlagNames[f];
            t.accuracy = kind;
            r.tables.push_back(std::move(t));
        }
    }
    std::vector<std::pair<const TestPlan*, const ReplayRun*>> pairs;
    for (const auto& ev : r.evaluations) pairs.emplace_back(&ev.plan, &ev.runs.at(0));
    r.status_pairs = status_pair_matrix(pairs);
    r.sensitivity = sensitivity_T(bundles, Ts, options);
    r.callers = caller_index(bundles);
    return r;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

    std::string fixed(double v, int digits = 6) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return buf;
    }

    std::string opt(const std::optional<double>& v) { return v ? fixed(*v) : ""; }

    constexpr std::array<const char*, 3> kStatusNames{"failed", "out_of_gas", "success"};

}  // namespace

std::string cross_tables_csv(const std::vector<CrossTable>& tables) {
    std::ostringstream out;
    out << "flag,accuracy,row,failed,intermediate,perfect,perfect_share,chi_square,dof,p_value\n";
    for (const auto& t : tables) {
        for (std::size_t row = 0; row < 2; ++row) {
            out << t.flag << ',' << t.accuracy << ',' << (row ? "yes" : "no");
            for (auto c : t.counts[row]) out << ',' << c;
            out << ',' << opt(t.perfect_share(row)) << ',' << fixed(t.chi.statistic) << ',' << t.chi.dof << ','
                << opt(t.chi.p_value) << '\n';
        }
    }
    return out.str();
}

std::string status_pairs_csv(const StatusPairMatrix& m) {
    std::ostringstream out;
    out << "historic\\replay,failed,out_of_gas,success\n";
    for (std::size_t i = 0; i < 3; ++i) {
        out << kStatusNames[i];
        for (auto c : m.counts[i]) out << ',' << c;
        out << '\n';
    }
    return out.str();
}

std::string sensitivity_csv(const std::vector<SensitivityPoint>& curve) {
    std::ostringstream out;
    out << "T,contracts,perfect_status,perfect_event,status_share,event_share\n";
    for (const auto& p : curve) {
        out << p.T << ',' << p.contracts << ',' << p.perfect_status << ',' << p.perfect_event << ',' << fixed(p.status_share()) << ','
            << fixed(p.event_share()) << '\n';
    }
    return out.str();
}

std::string coverage_csv(const std::vector<Evaluation>& evaluations) {
    std::ostringstream out;
    out << "contract,address,executed,instruction_count,coverage_pct\n";
    for (const auto& ev : evaluations) {
        if (!ev.coverage) continue;
        out << ev.name << ',' << ev.contract.hex() << ',' << ev.coverage->executed << ',' << ev.coverage->instruction_count << ','
            << fixed(ev.coverage->coverage_pct, 2) << '\n';
    }
    return out.str();
}

std::string flags_csv(const std::vector<Evaluation>& evaluations) {
    std::ostringstream out;
    out << "contract,address";
    for (const char* f : kFlagNames) out << ',' << f;
    out << ",T,status_t,status_category,event_t,event_category\n";
    for (const auto& ev : evaluations) {
        out << ev.name << ',' << ev.contract.hex();
        for (std::size_t f = 0; f < kFlagNames.size(); ++f) out << ',' << (ev.flags.get(f) ? "yes" : "no");
        out << ',' << ev.status.T << ',' << ev.status.t << ',' << replayer::category_name(ev.status.category) << ',' << ev.event.t << ','
            << replayer::category_name(ev.event.category) << '\n';
    }
    return out.str();
}

std::string callers_csv(const CallerIndex& index) {
    std::ostringstream out;
    out << "callee,caller,method\n";
    for (const auto& [callee, edges] : index) {
        for (const auto& [caller, method] : edges) out << callee.hex() << ',' << caller.hex() << ',' << method << '\n';
    }
    return out.str();
}

std::string text_report(const CorpusReport& report) {
    std::ostringstream out;
    out << "Contracts evaluated: " << report.evaluations.size() << "\n";
    for (const auto& ev : report.evaluations) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-14s %s  status %zu/%zu %-12s event %zu/%zu %s\n", ev.name.c_str(), ev.contract.hex().c_str(),
                      ev.status.t, ev.status.T, replayer::category_name(ev.status.category).c_str(), ev.event.t, ev.event.T,
                      replayer::category_name(ev.event.category).c_str());
        out << line;
    }
    for (const auto& [addr, why] : report.failures) out << "  could not evaluate " << addr.hex() << ": " << why << "\n";

    const auto total = report.status_pairs.total();
    out << "\nHistoric vs replay status (" << total << " transaction pairs)\n";
    out << "  historic \\ replay      failed  out_of_gas     success\n";
    for (std::size_t i = 0; i < 3; ++i) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-18s", kStatusNames[i]);
        out << line;
        for (auto c : report.status_pairs.counts[i]) {
            std::snprintf(line, sizeof line, "%12llu", static_cast<unsigned long long>(c));
            out << line;
        }
        out << "\n";
    }
    if (total > 0) out << "  same status: " << fixed(100.0 * double(report.status_pairs.diagonal()) / double(total), 1) << "%\n";

    out << "\nCross tables (rows: flag no/yes; columns: failed / intermediate / perfect)\n";
    for (const auto& t : report.tables) {
        out << "  " << t.flag << " x " << t.accuracy << " accuracy\n";
        for (std::size_t row = 0; row < 2; ++row) {
            char line[128];
            std::snprintf(line, sizeof line, "    %-4s %6llu %6llu %6llu\n", row ? "yes" : "no", static_cast<unsigned long long>(t.counts[row][0]),
                          static_cast<unsigned long long>(t.counts[row][1]), static_cast<unsigned long long>(t.counts[row][2]));
            out << line;
        }
        out << "    chi-square " << fixed(t.chi.statistic, 3) << ", dof " << t.chi.dof;
        if (t.chi.p_value) out << ", p " << fixed(*t.chi.p_value, 4);
        out << "\n";
    }

    out << "\nPerfect share by T\n";
    for (const auto& p : report.sensitivity) {
        out << "  T=" << p.T << "  status " << fixed(100.0 * p.status_share(), 1) << "%  event " << fixed(100.0 * p.event_share(), 1) << "%\n";
    }
    return out.str();
}

}  // namespace replaylab::analytics
