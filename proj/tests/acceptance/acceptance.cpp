// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <openssl/sha.h>

#include <replaylab/chain/json.hpp>
#include <replaylab/explorer/server.hpp>
#include <replaylab/mcl/compiler.hpp>
#include <replaylab/pipeline/pipeline.hpp>
#include <replaylab/pipeline/scenario.hpp>

using namespace replaylab;
namespace fs = std::filesystem;
using replayer::Category;
using replayer::Ratio;

namespace {

const fs::path kFixtures{REPLAYLAB_FIXTURE_DIR};
const std::vector<std::string> kScenarios{"factory", "ledger", "minilotto", "proxy", "resolver", "sale", "wallie", "corpus"};
constexpr explorer::RateLimiterPolicy kNoLimit{0, 0, 0};

struct Verdict {
    bool pass{true};
    std::string detail;
};

// Collects failure notes; the verdict passes only if none were added.
struct Notes {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    Verdict verdict(const std::string& summary) const {
        if (failures.empty()) return {true, summary};
        std::string d = summary + " | ";
        for (std::size_t i = 0; i < failures.size() && i < 5; ++i) d += (i ? "; " : "") + failures[i];
        if (failures.size() > 5) d += "; +" + std::to_string(failures.size() - 5) + " more";
        return {false, d};
    }
};

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("replaylab-acceptance-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Served {
    explicit Served(const std::string& scenario)
        : rec(pipeline::record_scenario_file(kFixtures / "scenarios" / (scenario + ".json"), kFixtures)),
          server(explorer::FixtureStore::from_text(chain::export_snapshot(rec.state))) {
        server.start();
    }
    pipeline::RecordedChain rec;
    explorer::Server server;

    explorer::HistoricBundle fetch(const Address& a, std::size_t T = 50) const {
        explorer::VirtualClock clock;
        explorer::ExplorerClient client{server.url(), kNoLimit, clock};
        return explorer::fetch_bundle(client, a, T);
    }
    pipeline::PipelineConfig config(const fs::path& out) const {
        pipeline::PipelineConfig cfg;
        cfg.explorer_url = server.url();
        cfg.rate = kNoLimit;
        cfg.out = out;
        return cfg;
    }
};

// Plan after one discovery pass, as the pipeline builds it.
scriptgen::TestPlan plan_for(const explorer::HistoricBundle& b, std::set<Address>* discovered = nullptr) {
    const auto first = scriptgen::generate_plan(b, scriptgen::build_address_map(b, {}), {});
    const auto found = replayer::discovery_pass(first);
    if (discovered) *discovered = found;
    return scriptgen::generate_plan(b, scriptgen::build_address_map(b, {found.begin(), found.end()}), {});
}

std::string ratio_text(const replayer::AccuracyResult& r) { return std::to_string(r.t) + "/" + std::to_string(r.T); }

// Cost table written out independently of the VM, keyed by mnemonic.
std::uint64_t table_cost(const mcl::Instruction& ins, const mcl::CompiledContract& c) {
    static const std::map<std::string, std::uint64_t> kTable = {
        {"PUSH", 0},       {"JUMP", 0},      {"JUMPI", 0},  {"REQUIRE", 0},  {"ASSERT", 0},   {"RET", 0},
        {"POP", 0},        {"SLOAD", 20},    {"MLOAD", 20}, {"ALOAD", 20},   {"ALEN", 20},    {"BALANCE", 20},
        {"BLOCKHASH", 20}, {"SSTORE", 100},  {"MSTORE", 100}, {"ASTORE", 100}, {"APUSH", 100}, {"CALL", 40},
        {"TRANSFER", 20}};
    const auto name = mcl::op_name(ins.op);
    if (name == "EMIT") return 50 + 10 * ins.b;
    if (name == "CREATE") return 200 + 10 * c.creatable.at(ins.a)->code.size();
    auto it = kTable.find(name);
    return it == kTable.end() ? 3 : it->second;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
    std::ostringstream out;
    for (unsigned char b : md) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return out.str();
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_hex(pipeline::read_file(e.path()));
    }
    return out;
}

// ---------------------------------------------------------------------------

Verdict closed_loop() {
    Notes n;
    const auto start = std::chrono::steady_clock::now();
    const auto root = scratch("closed-loop");
    std::vector<std::string> included;
    for (const auto& s : kScenarios) {
        const Served srv{s};
        for (const auto& [alias, addr] : srv.rec.aliases) {
            auto cfg = srv.config(root / s / alias);
            cfg.runs = 5;
            const auto res = pipeline::run_pipeline(cfg, addr);
            if (res.failed_stage) {
                n.expect(false, s + "/" + alias + " stage " + *res.failed_stage);
                continue;
            }
            const auto acc = chain::Json::parse(pipeline::read_file(cfg.out / "accuracy.json"));
            const auto& f = acc.at("flags");
            // external dependencies: casts to other contracts, calls from other contracts, unresolved ad-hoc addresses
            if (f.at("contract_casts").get<bool>() || f.at("called_by_contracts").get<bool>() || f.at("adhoc_addresses").get<bool>()) {
                continue;
            }
            included.push_back(s + "/" + alias);
            const auto T = acc.at("T").get<std::size_t>();
            n.expect(acc.at("runs").size() == 5, alias + ": expected 5 runs");
            for (const auto& r : acc.at("runs")) {
                const auto st = r.at("status").at("t").get<std::size_t>();
                const auto ev = r.at("event").at("t").get<std::size_t>();
                n.expect(st == T && ev == T, s + "/" + alias + " run " + std::to_string(r.at("run").get<int>()) + " status " +
                                                 std::to_string(st) + "/" + std::to_string(T) + " event " + std::to_string(ev) + "/" +
                                                 std::to_string(T));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    n.expect(!included.empty(), "no dependency-free contracts found");
    n.expect(secs < 30.0, "took " + std::to_string(secs) + " s");
    std::ostringstream d;
    d << included.size() << " dependency-free contracts x 5 runs at T/T in " << std::fixed << std::setprecision(2) << secs << " s";
    return n.verdict(d.str());
}

Verdict accuracy_arithmetic() {
    Notes n;
    const Served srv{"minilotto"};
    const auto plan = plan_for(srv.fetch(srv.rec.aliases.at("lotto")));
    replayer::RunConfig cfg;
    cfg.runs = 1;
    const auto run = replayer::replay(plan, cfg, 0);
    const std::size_t T = plan.T();
    n.expect(replayer::status_accuracy(run, plan).ratio() == Ratio(1), "unmutated plan not T/T");
    std::ostringstream d;
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, T / 2, T - 1}) {
        auto mutated = plan;
        auto& step = mutated.txs.at(k);
        step.force_fail = false;
        step.expected_status = run.outcomes.at(k).status == chain::Status::kSuccess ? chain::Status::kFailed : chain::Status::kSuccess;
        const auto acc = replayer::status_accuracy(run, mutated);
        const Ratio oracle(k, T);  // prefix definition: k agreeing steps before the flip
        n.expect(acc.ratio() == oracle, "k=" + std::to_string(k) + " gave " + ratio_text(acc));
        d << "k=" << k << ":" << acc.t << "/" << acc.T << " ";
    }
    return n.verdict(d.str() + "(T=" + std::to_string(T) + ")");
}

struct LottoRuns {
    scriptgen::TestPlan plan;
    std::vector<replayer::ReplayRun> runs;  // runs 0..4 historic, run 5 rigged
    std::map<std::string, replayer::OutputMatrix> matrices;
    mcl::CompiledContract code;
};

const LottoRuns& lotto_runs() {
    static const LottoRuns l = [] {
        const Served srv{"minilotto"};
        LottoRuns out;
        const auto b = srv.fetch(srv.rec.aliases.at("lotto"));
        out.plan = plan_for(b);
        replayer::RunConfig cfg;
        cfg.runs = 6;
        cfg.run_schedules[5] = replayer::Schedule::sequential(451, 500);
        out.runs = replayer::replay_all(out.plan, cfg);
        for (auto& m : replayer::collect_matrices(out.runs, out.plan)) out.matrices[m.name] = std::move(m);
        out.code = mcl::compile_contract(mcl::parse(b.source), b.contract_name);
        return out;
    }();
    return l;
}

Verdict what_if_minilotto() {
    Notes n;
    const auto& l = lotto_runs();
    const std::size_t col = 5;
    const auto& won = l.matrices.at("event:NewPlay.won");
    const auto& number = l.matrices.at("event:NewPlay.number");
    std::set<std::string> seen;
    for (std::size_t r = 0; r < won.rows; ++r) {
        const std::uint64_t ts = 451 + 500 * r;
        const Word oracle = Word{(ts * 2) % 1000};  // the draw formula evaluated by hand
        const auto w = won.at(r, col);
        const auto v = number.at(r, col);
        n.expect(w && *w == 1, "row " + std::to_string(r) + " not won");
        n.expect(v && *v > 900, "row " + std::to_string(r) + " number not above 900");
        n.expect(v && *v == oracle, "row " + std::to_string(r) + " number differs from formula");
        if (v) seen.insert(word_to_dec(*v));
    }
    std::string values;
    for (const auto& s : seen) values += (values.empty() ? "" : ",") + s;
    return n.verdict(std::to_string(won.rows) + " rows won under sequential:451:500, number in {" + values + "}");
}

Verdict gas_correlation() {
    Notes n;
    const auto& l = lotto_runs();
    const auto& gas = l.matrices.at("gas_used");
    const auto& won = l.matrices.at("event:NewPlay.won");
    std::size_t checked = 0, pairs = 0;
    for (std::size_t c = 0; c < gas.cols; ++c) {
        std::vector<Word> winners, losers;
        for (std::size_t r = 0; r < gas.rows; ++r) {
            const auto g = gas.at(r, c);
            const auto w = won.at(r, c);
            if (!g || !w) {
                n.expect(false, "missing cell " + std::to_string(r) + "," + std::to_string(c));
                continue;
            }
            (*w == 1 ? winners : losers).push_back(*g);

            // oracle: intrinsic 100 plus the table cost of every executed instruction
            const auto& o = l.runs[c].outcomes[r];
            std::uint64_t expected = 100;
            for (const auto& [addr, counts] : o.path) {
                if (addr != l.runs[c].deployed) {
                    n.expect(false, "foreign code on the path");
                    continue;
                }
                for (const auto& [idx, times] : counts) expected += times * table_cost(l.code.code.at(idx), l.code);
            }
            n.expect(!o.path.empty() && *g == Word{expected}, "run " + std::to_string(c) + " step " + std::to_string(r) + " gas " +
                                                                   word_to_dec(*g) + " vs oracle " + std::to_string(expected));
            ++checked;
        }
        for (const auto& w : winners) {
            for (const auto& s : losers) {
                n.expect(w > s, "run " + std::to_string(c) + ": winner gas " + word_to_dec(w) + " <= loser gas " + word_to_dec(s));
                ++pairs;
            }
        }
    }
    n.expect(pairs > 0, "no winner/loser pairs");
    return n.verdict(std::to_string(checked) + " cells match the cost table, " + std::to_string(pairs) + " winner>loser pairs");
}

Verdict adhoc_recovery() {
    Notes n;
    // encoding oracle: every {"address": "$k", ...} packed argument of the scenario script
    const auto script = chain::Json::parse(pipeline::read_file(kFixtures / "scenarios" / "ledger.json"));
    std::set<Address> oracle;
    std::size_t encoding_txs = 0;
    for (const auto& step : script.at("steps")) {
        if (!step.contains("args") || step.value("expect", "success") != "success") continue;
        std::size_t here = 0;
        std::function<void(const chain::Json&)> walk = [&](const chain::Json& v) {
            if (v.is_array()) {
                for (const auto& x : v) walk(x);
            } else if (v.is_object() && v.contains("address")) {
                oracle.insert(pipeline::historic_eoa(std::stoull(v.at("address").get<std::string>().substr(1))));
                ++here;
            }
        };
        walk(step.at("args"));
        n.expect(here == 0 || here == 25, "transaction encodes " + std::to_string(here) + " addresses");
        encoding_txs += here > 0;
    }
    n.expect(encoding_txs == 2 && oracle.size() == 50, "oracle holds " + std::to_string(oracle.size()) + " addresses");

    const Served srv{"ledger"};
    std::set<Address> found;
    const auto plan = plan_for(srv.fetch(srv.rec.aliases.at("ledger")), &found);
    n.expect(found == oracle, "discovered " + std::to_string(found.size()) + " addresses, not the encoded set");
    replayer::RunConfig cfg;
    for (const auto& run : replayer::replay_all(plan, cfg)) {
        n.expect(replayer::status_accuracy(run, plan).ratio() == Ratio(1) && replayer::event_accuracy(run, plan).ratio() == Ratio(1),
                 "run " + std::to_string(run.run) + " below T/T");
    }
    return n.verdict(std::to_string(found.size()) + "/" + std::to_string(oracle.size()) + " encoded addresses recovered, T=" +
                     std::to_string(plan.T()) + " replays T/T");
}

const std::vector<std::string> kCorpus{"tally",     "escrow",     "namebook",  "auction",   "points",  "notary",
                                       "clockfeed", "clockgrant", "clockclub", "feedgrant", "feedclub", "grantclub"};

const pipeline::CorpusResult& corpus() {
    static const pipeline::CorpusResult r = [] {
        const Served srv{"corpus"};
        auto cfg = srv.config(scratch("corpus"));
        std::vector<Address> list;
        for (const auto& alias : kCorpus) list.push_back(srv.rec.aliases.at(alias));
        return pipeline::run_corpus(cfg, list);
    }();
    return r;
}

double pearson_by_hand(const std::vector<std::vector<double>>& o) {
    double total = 0;
    std::vector<double> rows(o.size(), 0), cols(o[0].size(), 0);
    for (std::size_t i = 0; i < o.size(); ++i) {
        for (std::size_t j = 0; j < o[i].size(); ++j) {
            rows[i] += o[i][j];
            cols[j] += o[i][j];
            total += o[i][j];
        }
    }
    double x = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
        for (std::size_t j = 0; j < o[i].size(); ++j) {
            const double e = rows[i] * cols[j] / total;
            x += (o[i][j] - e) * (o[i][j] - e) / e;
        }
    }
    return x;
}

Verdict dependency_direction() {
    Notes n;
    const auto hand = analytics::chi_square({{10, 20}, {20, 10}}).statistic;
    n.expect(std::abs(hand - 20.0 / 3.0) < 1e-9, "hand table statistic " + std::to_string(hand));
    n.expect(std::abs(hand - pearson_by_hand({{10, 20}, {20, 10}})) < 1e-9, "hand table disagrees with Pearson by hand");

    const auto& c = corpus();
    n.expect(c.report.evaluations.size() == 12, std::to_string(c.report.evaluations.size()) + " contracts evaluated");
    n.expect(c.report.tables.size() == 8, std::to_string(c.report.tables.size()) + " tables");
    std::ostringstream d;
    d << "chi2(hand)=" << std::setprecision(12) << hand << std::setprecision(3);
    for (const auto& t : c.report.tables) {
        const auto no = t.perfect_share(0), yes = t.perfect_share(1);
        const std::string tag = t.flag + "/" + t.accuracy;
        n.expect(t.row_total(1) == 3, tag + " has " + std::to_string(t.row_total(1)) + " yes rows");
        n.expect(no && yes && *no >= *yes, tag + " perfect share no < yes");
        n.expect(t.chi.statistic > 0, tag + " chi2 = 0");
        d << " " << tag << ":" << no.value_or(-1) << ">=" << yes.value_or(-1) << ",chi2=" << t.chi.statistic;
    }
    return n.verdict(d.str());
}

Verdict forced_failures() {
    Notes n;
    std::size_t forced = 0, probed_contracts = 0, probes = 0;
    for (const auto& s : kScenarios) {
        const Served srv{s};
        for (const auto& [alias, addr] : srv.rec.aliases) {
            const auto b = srv.fetch(addr);
            std::size_t failed_hist = 0;
            for (const auto& r : b.transactions) failed_hist += r.receipt.status != chain::Status::kSuccess;
            if (failed_hist == 0) continue;
            const auto plan = plan_for(b);
            replayer::RunConfig cfg;
            cfg.runs = 1;
            const auto run = replayer::replay(plan, cfg, 0);
            const std::string who = s + "/" + alias;
            std::size_t here = 0;
            for (std::size_t i = 0; i < plan.T(); ++i) {
                const bool hist_failed = b.transactions[i].receipt.status != chain::Status::kSuccess;
                n.expect(plan.txs[i].force_fail == hist_failed, who + " step " + std::to_string(i) + " forced flag");
                if (!hist_failed) continue;
                ++here;
                n.expect(plan.txs[i].illegal_from == scriptgen::illegal_sender(i), who + " step " + std::to_string(i) + " sender");
                if (!run.deploy_ok) continue;
                const auto& o = run.outcomes[i];
                n.expect(o.status == chain::Status::kFailed && o.failure_reason == "unknown sender" && !o.gas_used,
                         who + " step " + std::to_string(i) + " did not fail via the illegal sender");
            }
            forced += here;
            // state probes only where the replay is otherwise in step with history
            if (!run.deploy_ok || replayer::status_accuracy(run, plan).category != Category::kPerfect ||
                replayer::event_accuracy(run, plan).category != Category::kPerfect) {
                continue;
            }
            ++probed_contracts;
            for (std::size_t g = 0; g < plan.getters.size(); ++g) {
                std::vector<chain::Value> args;
                for (const auto& a : plan.getters[g].args) args.push_back({a.type, scriptgen::historic_word(plan.address_map, a.word), {}});
                const auto expected = srv.rec.state.call_pure(addr, plan.getters[g].method, args);
                const auto& got = run.getters.at(g);
                if (!got.result) {
                    n.expect(false, who + " getter " + got.method + " failed");
                    continue;
                }
                std::vector<chain::Value> mapped;
                for (const auto& v : *got.result) mapped.push_back(replayer::historic_value(plan.address_map, run.deployed, v));
                n.expect(mapped == expected, who + " getter " + got.method + " differs from history");
                ++probes;
            }
        }
    }
    n.expect(forced > 0, "no historically failed transactions in the fixtures");
    n.expect(probes > 0, "no getter probes ran");
    return n.verdict(std::to_string(forced) + " failed transactions forced; " + std::to_string(probes) + " getter probes on " +
                     std::to_string(probed_contracts) + " contracts match history");
}

Verdict sensitivity_monotone() {
    Notes n;
    const auto& curve = corpus().report.sensitivity;
    const std::vector<std::size_t> Ts{1, 5, 10, 25, 50};
    n.expect(curve.size() == Ts.size(), "curve has " + std::to_string(curve.size()) + " points");
    std::ostringstream d;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        n.expect(i < Ts.size() && curve[i].T == Ts[i], "unexpected T grid");
        n.expect(curve[i].contracts == 12, "T=" + std::to_string(curve[i].T) + " covers " + std::to_string(curve[i].contracts));
        if (i > 0) {
            n.expect(curve[i].perfect_status <= curve[i - 1].perfect_status, "status share rises at T=" + std::to_string(curve[i].T));
            n.expect(curve[i].perfect_event <= curve[i - 1].perfect_event, "event share rises at T=" + std::to_string(curve[i].T));
        }
        d << "T=" << curve[i].T << ":" << curve[i].perfect_status << "/" << curve[i].perfect_event << " ";
    }
    return n.verdict(d.str() + "(perfect status/event of 12)");
}

Verdict explorer_round_trip() {
    Notes n;
    std::size_t contracts = 0;
    for (const auto& s : kScenarios) {
        const Served srv{s};
        const auto& st = srv.rec.state;
        for (const auto& [alias, addr] : srv.rec.aliases) {
            const std::string who = s + "/" + alias;
            const auto b = srv.fetch(addr, 1000);
            ++contracts;
            std::vector<chain::TxRecord> expected;
            std::vector<chain::EventRecord> logs;
            for (const auto& tx : st.transactions()) {
                if (tx.to != addr) continue;
                auto r = *st.receipt(tx.hash);
                for (const auto& e : r.events) {
                    if (e.emitter == addr) logs.push_back(e);
                }
                std::erase_if(r.events, [&](const chain::EventRecord& e) { return e.emitter != addr; });
                expected.push_back({tx, r, st.blocks().at(r.block_number).timestamp});
            }
            n.expect(!b.partial, who + " partial");
            n.expect(b.transactions == expected, who + " transactions differ");
            n.expect(b.event_logs == logs, who + " logs differ");
            for (const auto& [key, value] : b.balances) n.expect(value == st.balance_at(key.first, key.second), who + " balance differs");
            for (const auto& [h, list] : b.internal_trace) n.expect(list == st.receipt(h)->internal_txs, who + " internal trace differs");
            const auto& c = st.contracts().at(addr);
            n.expect(b.source == c.source && b.creation.tx_hash == c.creation_tx && b.creation.from == c.creator &&
                         b.creation.args == c.constructor_args && b.creation.internal == c.created_internal,
                     who + " creation differs");
        }
    }

    // rate limiting on a virtual clock, through a real fetch
    const Served srv{"wallie"};
    explorer::VirtualClock clock;
    const explorer::RateLimiterPolicy policy{350, 5, 1000};
    explorer::ExplorerClient client{srv.server.url(), policy, clock};
    explorer::fetch_bundle(client, srv.rec.aliases.at("wallie"), 50);
    const auto& t = client.request_times();
    std::size_t pauses = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        n.expect(t[i] - t[i - 1] >= policy.min_interval_ms, "gap " + std::to_string(t[i] - t[i - 1]) + " ms at request " + std::to_string(i));
        if (i % policy.pause_every == 0) {
            n.expect(t[i] - t[i - 1] >= policy.pause_ms, "no pause after request " + std::to_string(i));
            ++pauses;
        }
    }
    n.expect(pauses > 0, "too few requests to observe a pause");
    return n.verdict(std::to_string(contracts) + " bundles match the chain; " + std::to_string(t.size()) + " requests spaced, " +
                     std::to_string(pauses) + " pauses");
}

Verdict determinism() {
    Notes n;
    const Served srv{"minilotto"};
    std::vector<std::map<std::string, std::string>> trees;
    for (const char* name : {"det-a", "det-b"}) {
        const auto cfg = srv.config(scratch(name));
        const auto res = pipeline::run_pipeline(cfg, srv.rec.aliases.at("lotto"));
        n.expect(!res.failed_stage, std::string(name) + " failed: " + res.error);
        trees.push_back(tree_hashes(cfg.out));
    }
    n.expect(trees[0].size() > 10, "artifact tree too small");
    n.expect(trees[0] == trees[1], "artifact trees differ");
    return n.verdict(std::to_string(trees[0].size()) + " files, identical SHA-256 per path across two executions");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"closed-loop fidelity", closed_loop},
        {"accuracy arithmetic", accuracy_arithmetic},
        {"timestamp what-if on minilotto", what_if_minilotto},
        {"gas/behavior correlation", gas_correlation},
        {"ad-hoc address recovery", adhoc_recovery},
        {"dependency effect direction", dependency_direction},
        {"forced-failure semantics", forced_failures},
        {"T-sensitivity monotone", sensitivity_monotone},
        {"explorer round trip and rate limiting", explorer_round_trip},
        {"pipeline determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << "criterion " << (i + 1) << " [" << criteria[i].first << "]: " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
