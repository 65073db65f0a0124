// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/pipeline/pipeline.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <replaylab/chain/json.hpp>
#include <replaylab/mcl/compiler.hpp>
#include <replaylab/pipeline/scenario.hpp>
#include <replaylab/viz/viz.hpp>

namespace replaylab::pipeline {

using chain::Json;
using replayer::AccuracyResult;
using replayer::Category;

StageError::StageError(std::string stage, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

void PipelineConfig::validate() const {
    if (explorer_url.empty()) throw std::invalid_argument("explorer URL is empty");
    if (T == 0) throw std::invalid_argument("tx limit must be positive");
    if (runs == 0) throw std::invalid_argument("runs must be positive");
    if (address_cap < 3) throw std::invalid_argument("address cap must be at least 3");
    if (schedule.kind == replayer::Schedule::Kind::kExplicit && schedule.list.empty()) {
        throw std::invalid_argument("explicit schedule is empty");
    }
    for (auto t : sensitivity_Ts) {
        if (t == 0) throw std::invalid_argument("sensitivity T values must be positive");
    }
}

replayer::RunConfig PipelineConfig::run_config() const {
    replayer::RunConfig rc;
    rc.runs = runs;
    rc.schedule = schedule;
    rc.gas_price = gas_price;
    return rc;
}

analytics::EvalOptions PipelineConfig::eval_options() const {
    analytics::EvalOptions o;
    o.seed = seed;
    o.address_cap = address_cap;
    o.run = run_config();
    return o;
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()); v != nullptr) return std::string(v);
    return std::nullopt;
}

namespace {

std::uint64_t to_u64(const std::string& what, const std::string& text) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::logic_error&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size() || text.front() == '-') throw std::invalid_argument(what + ": not a number: '" + text + "'");
    return v;
}

std::uint64_t json_u64(const std::string& key, const Json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_string()) return to_u64(key, v.get<std::string>());
    throw std::invalid_argument(key + ": expected a non-negative integer");
}

}  // namespace

void apply_env(PipelineConfig& cfg, const EnvLookup& env) {
    if (auto url = env("EXPLORER_URL")) cfg.explorer_url = *url;
    if (auto v = env("EXPLORER_MIN_INTERVAL_MS")) cfg.rate.min_interval_ms = to_u64("EXPLORER_MIN_INTERVAL_MS", *v);
    if (auto v = env("EXPLORER_PAUSE_EVERY")) cfg.rate.pause_every = to_u64("EXPLORER_PAUSE_EVERY", *v);
    if (auto v = env("EXPLORER_PAUSE_MS")) cfg.rate.pause_ms = to_u64("EXPLORER_PAUSE_MS", *v);
}

void apply_config_json(PipelineConfig& cfg, const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "explorer_url") {
            cfg.explorer_url = v.get<std::string>();
        } else if (key == "tx_limit") {
            cfg.T = json_u64(key, v);
        } else if (key == "runs") {
            cfg.runs = json_u64(key, v);
        } else if (key == "seed") {
            cfg.seed = json_u64(key, v);
        } else if (key == "address_cap") {
            cfg.address_cap = json_u64(key, v);
        } else if (key == "schedule") {
            cfg.schedule = parse_schedule(v.get<std::string>(), base_dir);
        } else if (key == "gas_price") {
            cfg.gas_price = v.is_string() ? word_from_string(v.get<std::string>()) : Word{json_u64(key, v)};
        } else if (key == "out") {
            cfg.out = v.get<std::string>();
        } else if (key == "min_interval_ms") {
            cfg.rate.min_interval_ms = json_u64(key, v);
        } else if (key == "pause_every") {
            cfg.rate.pause_every = json_u64(key, v);
        } else if (key == "pause_ms") {
            cfg.rate.pause_ms = json_u64(key, v);
        } else if (key == "sensitivity_T") {
            cfg.sensitivity_Ts.clear();
            for (const auto& t : v) cfg.sensitivity_Ts.push_back(json_u64(key, t));
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

PipelineConfig load_config(const std::optional<fs::path>& file, const EnvLookup& env) {
    PipelineConfig cfg;
    cfg.rate = explorer::RateLimiterPolicy{};
    apply_env(cfg, env);
    if (file) {
        Json j;
        try {
            j = Json::parse(read_file(*file));
        } catch (const Json::parse_error& e) {
            throw std::invalid_argument(file->string() + ": " + e.what());
        }
        apply_config_json(cfg, j, file->parent_path());
    }
    return cfg;
}

replayer::Schedule parse_schedule(const std::string& text, const fs::path& base_dir) {
    if (text.rfind("file:", 0) != 0) return replayer::Schedule::parse(text);
    fs::path p = text.substr(5);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    const auto body = read_file(p);
    std::vector<std::uint64_t> ts;
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '[') {
        for (const auto& v : Json::parse(body)) ts.push_back(json_u64(p.string(), v));
    } else {
        std::istringstream in(body);
        for (std::string tok; in >> tok;) ts.push_back(to_u64(p.string(), tok));
    }
    if (ts.empty()) throw std::invalid_argument(p.string() + ": schedule file holds no timestamps");
    return replayer::Schedule::explicit_list(std::move(ts));
}

std::string artifact_name(const std::string& contract, const std::string& output, const std::string& schedule) {
    std::string s = contract + "_" + output + "_" + schedule;
    for (auto& c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) c = '-';
    }
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string record_fixture(const fs::path& scenario, const fs::path& source_dir, const std::optional<fs::path>& aliases_out) {
    const auto rec = record_scenario_file(scenario, source_dir);
    if (aliases_out) {
        Json a = Json::object();
        for (const auto& [alias, addr] : rec.aliases) a[alias] = addr.hex();
        write_file(*aliases_out, a.dump(1) + "\n");
    }
    return chain::export_snapshot(rec.state);
}

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

Json accuracy_json(const AccuracyResult& r) {
    return {{"t", r.t}, {"T", r.T}, {"category", replayer::category_name(r.category)}};
}

Json addresses_json(const std::set<Address>& s) {
    Json a = Json::array();
    for (const auto& x : s) a.push_back(x.hex());
    return a;
}

std::string contract_label(const scriptgen::TestPlan& plan) {
    return plan.contract_name.empty() ? plan.historic_contract.hex() : plan.contract_name;
}

std::optional<analytics::CoverageReport> coverage_of(const explorer::HistoricBundle& bundle, const replayer::ReplayRun& run) {
    if (!run.deploy_ok) return std::nullopt;
    try {
        const auto code = mcl::compile_contract(mcl::parse(bundle.source), bundle.contract_name);
        std::vector<std::set<std::uint32_t>> per_tx;
        for (const auto& o : run.outcomes) per_tx.push_back(o.executed_instructions);
        return analytics::coverage(per_tx, code);
    } catch (const std::exception&) {
        // literal-linked sources compile only after translation
        return std::nullopt;
    }
}

}  // namespace

explorer::HistoricBundle stage_fetch(const PipelineConfig& cfg, const Address& contract, const fs::path& dir) {
    return stage("fetch", [&] {
        auto b = explorer::fetch_bundle(cfg.explorer_url, contract, cfg.T, cfg.rate);
        write_file(dir / "bundle.json", explorer::bundle_to_json(b).dump(1) + "\n");
        return b;
    });
}

Generated stage_gen(const PipelineConfig& cfg, const explorer::HistoricBundle& bundle, const fs::path& dir) {
    return stage("gen", [&] {
        const scriptgen::GenerateOptions gen{cfg.seed, false};
        const auto first = scriptgen::generate_plan(bundle, scriptgen::build_address_map(bundle, {}, cfg.address_cap), gen);
        auto probe = cfg.run_config();
        probe.schedule = replayer::Schedule::historic();
        Generated g;
        g.discovered = replayer::discovery_pass(first, probe);
        g.plan = scriptgen::generate_plan(
            bundle, scriptgen::build_address_map(bundle, {g.discovered.begin(), g.discovered.end()}, cfg.address_cap), gen);

        const auto genesis = scriptgen::genesis_config(g.plan, probe.endowment, cfg.gas_price);
        write_file(dir / "discovery.json", addresses_json(g.discovered).dump(1) + "\n");
        write_file(dir / g.plan.source_path(), g.plan.source);
        write_file(dir / "plan.json", scriptgen::render_plan(g.plan));
        write_file(dir / "genesis.json", genesis.dump(1) + "\n");
        write_file(dir / "testbox.tar", scriptgen::test_box(g.plan, genesis));
        return g;
    });
}

Replayed stage_replay(const PipelineConfig& cfg, const scriptgen::TestPlan& plan, const fs::path& dir) {
    return stage("replay", [&] {
        const auto rc = cfg.run_config();
        rc.validate(plan.T());
        Replayed r;
        r.runs = replayer::replay_all(plan, rc);
        if (rc.schedule_for(0).kind == replayer::Schedule::Kind::kHistoric) {
            r.historic = r.runs.at(0);
        } else {
            auto h = rc;
            h.schedule = replayer::Schedule::historic();
            h.run_schedules.clear();
            r.historic = replayer::replay(plan, h, 0);
            write_file(dir / "runs" / "historic-0.jsonl", replayer::run_to_jsonl(r.historic, plan));
        }
        for (const auto& run : r.runs) {
            write_file(dir / "runs" / ("run-" + std::to_string(run.run) + ".jsonl"), replayer::run_to_jsonl(run, plan));
        }
        return r;
    });
}

Category stage_report(const PipelineConfig& cfg, const scriptgen::TestPlan& plan, const Replayed& replayed,
                      const std::optional<explorer::HistoricBundle>& bundle, const std::set<Address>& discovered,
                      const fs::path& dir) {
    return stage("report", [&] {
        const auto status = replayer::status_accuracy(replayed.historic, plan);
        const auto event = replayer::event_accuracy(replayed.historic, plan);
        const std::string contract = contract_label(plan);
        const std::string sched = cfg.schedule.label();

        Json acc{{"contract", plan.historic_contract.hex()},
                 {"name", plan.contract_name},
                 {"T", plan.T()},
                 {"requested_T", plan.requested_T},
                 {"truncated", plan.truncated},
                 {"schedule", sched},
                 {"historic", {{"deploy_ok", replayed.historic.deploy_ok}, {"status", accuracy_json(status)}, {"event", accuracy_json(event)}}},
                 {"discovered", discovered.size()}};
        if (replayed.historic.deploy_error) acc["historic"]["deploy_error"] = *replayed.historic.deploy_error;
        Json runs = Json::array();
        for (const auto& run : replayed.runs) {
            Json r{{"run", run.run},
                   {"schedule", run.schedule},
                   {"deploy_ok", run.deploy_ok},
                   {"status", accuracy_json(replayer::status_accuracy(run, plan))},
                   {"event", accuracy_json(replayer::event_accuracy(run, plan))}};
            if (run.deploy_error) r["deploy_error"] = *run.deploy_error;
            runs.push_back(std::move(r));
        }
        acc["runs"] = std::move(runs);
        if (bundle) {
            const auto flags = analytics::flag_vector(analytics::bundle_static_flags(*bundle), *bundle, discovered);
            Json f = Json::object();
            for (std::size_t i = 0; i < analytics::kFlagNames.size(); ++i) f[analytics::kFlagNames[i]] = flags.get(i);
            acc["flags"] = std::move(f);
            if (const auto cov = coverage_of(*bundle, replayed.historic)) {
                acc["coverage"] = {{"executed", cov->executed}, {"instructions", cov->instruction_count}, {"pct", cov->coverage_pct}};
            }
        }
        write_file(dir / "accuracy.json", acc.dump(1) + "\n");

        std::vector<viz::SeriesPlotSpec> balances;
        std::ostringstream listing;
        for (const auto& m : replayer::collect_matrices(replayed.runs, plan)) {
            const auto name = artifact_name(contract, m.name, sched);
            write_file(dir / "matrices" / (name + ".csv"), viz::export_csv(m));
            if (m.rows == 0 || m.cols == 0) continue;
            viz::HeatmapSpec spec;
            spec.title = contract + " " + m.name + " (" + sched + ")";
            write_file(dir / "matrices" / (name + ".svg"), viz::heatmap(m, spec));
            listing << "  " << name << "\n";
            if (m.name.rfind("balance:", 0) == 0) {
                auto s = viz::balance_series(m, "ref " + m.name.substr(8));
                bool any = false;
                for (const auto& pts : s.runs) any = any || !pts.empty();
                if (any) balances.push_back(std::move(s));
            }
        }
        if (!balances.empty()) {
            write_file(dir / "figures" / (artifact_name(contract, "balances", sched) + ".svg"),
                       viz::balance_plot(balances, contract + " balances (" + sched + ")"));
        }

        std::ostringstream summary;
        summary << "contract " << contract << " " << plan.historic_contract.hex() << "\n"
                << "transactions " << plan.T() << (plan.truncated ? " (address map truncated)" : "") << "\n"
                << "runs " << replayed.runs.size() << " schedule " << sched << "\n"
                << "status accuracy " << status.t << "/" << status.T << " " << replayer::category_name(status.category) << "\n"
                << "event accuracy " << event.t << "/" << event.T << " " << replayer::category_name(event.category) << "\n";
        if (replayed.historic.deploy_error) summary << "deploy error " << *replayed.historic.deploy_error << "\n";
        summary << "matrices\n" << listing.str();
        write_file(dir / "summary.txt", summary.str());
        return status.category;
    });
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const Address& contract) {
    PipelineResult res;
    try {
        stage("config", [&] {
            cfg.validate();
            return 0;
        });
        fs::create_directories(cfg.out);
        const auto bundle = stage_fetch(cfg, contract, cfg.out);
        const auto gen = stage_gen(cfg, bundle, cfg.out);
        const auto replayed = stage_replay(cfg, gen.plan, cfg.out);
        res.status_category = stage_report(cfg, gen.plan, replayed, bundle, gen.discovered, cfg.out);
        res.exit_code = *res.status_category == Category::kPerfect ? 0 : 1;
    } catch (const StageError& e) {
        res.failed_stage = e.stage();
        res.error = e.what();
        res.exit_code = 2;
    }
    return res;
}

CorpusResult run_corpus(const PipelineConfig& cfg, const std::vector<Address>& contracts) {
    cfg.validate();
    CorpusResult res;
    std::vector<explorer::HistoricBundle> bundles;
    for (const auto& a : contracts) {
        try {
            bundles.push_back(stage_fetch(cfg, a, cfg.out / "bundles" / a.hex()));
        } catch (const StageError& e) {
            res.fetch_failures.emplace_back(a, e.what());
        }
    }
    res.report = analytics::analyze_corpus(bundles, cfg.sensitivity_Ts, cfg.eval_options());
    auto all = res.report;
    all.failures.insert(all.failures.end(), res.fetch_failures.begin(), res.fetch_failures.end());
    std::sort(all.failures.begin(), all.failures.end());
    write_corpus_report(all, cfg.out);
    return res;
}

void write_corpus_report(const analytics::CorpusReport& report, const fs::path& dir) {
    write_file(dir / "flags.csv", analytics::flags_csv(report.evaluations));
    write_file(dir / "cross_tables.csv", analytics::cross_tables_csv(report.tables));
    write_file(dir / "status_pairs.csv", analytics::status_pairs_csv(report.status_pairs));
    write_file(dir / "sensitivity.csv", analytics::sensitivity_csv(report.sensitivity));
    write_file(dir / "coverage.csv", analytics::coverage_csv(report.evaluations));
    write_file(dir / "callers.csv", analytics::callers_csv(report.callers));
    write_file(dir / "report.txt", analytics::text_report(report));
}

}  // namespace replaylab::pipeline
