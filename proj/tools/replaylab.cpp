// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include <CLI11.hpp>

#include <replaylab/explorer/server.hpp>
#include <replaylab/pipeline/pipeline.hpp>
#include <replaylab/viz/viz.hpp>

namespace fs = std::filesystem;
using namespace replaylab;
using pipeline::PipelineConfig;

namespace {

// Flags shared by every command that talks to the explorer or replays.
struct ConfigFlags {
    std::string config_file;
    std::string url;
    std::size_t T{0};
    std::size_t runs{0};
    std::uint64_t seed{0};
    std::string schedule;
    std::size_t cap{0};
    std::string gas_price;
    std::string out;
    std::vector<std::size_t> Ts;

    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App* app) {
        opts["config"] = app->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
        opts["url"] = app->add_option("--explorer-url", url, "explorer base URL");
        opts["T"] = app->add_option("--tx-limit", T, "transactions per contract (default 50)");
        opts["runs"] = app->add_option("--runs", runs, "replay runs (default 5)");
        opts["seed"] = app->add_option("--seed", seed, "getter argument seed");
        opts["schedule"] = app->add_option("--schedule", schedule, "historic | sequential:<start>:<stride> | offset:<d> | file:<path>");
        opts["cap"] = app->add_option("--address-cap", cap, "address map capacity (default 1000)");
        opts["gas"] = app->add_option("--gas-price", gas_price, "gas price in wei (default 0)");
        opts["out"] = app->add_option("--out", out, "output directory");
        opts["Ts"] = app->add_option("--sensitivity-t", Ts, "T values of the sensitivity curve")->delimiter(',');
    }

    bool given(const std::string& k) const { return opts.at(k)->count() > 0; }

    // defaults < env < file < flags
    PipelineConfig resolve() const {
        auto cfg = pipeline::load_config(given("config") ? std::optional<fs::path>(config_file) : std::nullopt, pipeline::process_env);
        if (given("url")) cfg.explorer_url = url;
        if (given("T")) cfg.T = T;
        if (given("runs")) cfg.runs = runs;
        if (given("seed")) cfg.seed = seed;
        if (given("schedule")) cfg.schedule = pipeline::parse_schedule(schedule);
        if (given("cap")) cfg.address_cap = cap;
        if (given("gas")) cfg.gas_price = word_from_string(gas_price);
        if (given("out")) cfg.out = out;
        if (given("Ts")) cfg.sensitivity_Ts = Ts;
        cfg.validate();
        return cfg;
    }
};

std::map<std::string, Address> load_aliases(const std::string& file) {
    std::map<std::string, Address> out;
    if (file.empty()) return out;
    const auto j = chain::Json::parse(pipeline::read_file(file));
    for (const auto& [k, v] : j.items()) out[k] = Address::from_hex(v.get<std::string>());
    return out;
}

// 0x-hex, or @alias resolved through the aliases file.
Address resolve_address(const std::string& text, const std::map<std::string, Address>& aliases) {
    if (!text.empty() && text.front() == '@') {
        const auto it = aliases.find(text.substr(1));
        if (it == aliases.end()) throw std::invalid_argument("unknown alias " + text);
        return it->second;
    }
    return Address::from_hex(text);
}

std::vector<explorer::HistoricBundle> load_bundles(const std::vector<std::string>& paths) {
    std::vector<fs::path> files;
    for (const fs::path p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p)) {
                if (e.is_regular_file() && e.path().filename() == "bundle.json") files.push_back(e.path());
            }
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<explorer::HistoricBundle> out;
    for (const auto& f : files) out.push_back(explorer::bundle_from_json(chain::Json::parse(pipeline::read_file(f))));
    return out;
}

int report_stage(const pipeline::StageError& e) {
    std::cerr << "replaylab: stage " << e.stage() << " failed: " << e.what() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"replaylab: record, serve, fetch, generate, replay and analyze contract histories"};
    app.require_subcommand(1);

    // record
    auto* record = app.add_subcommand("record", "run a scenario script and write the fixture stream");
    std::string scenario, sources, record_out, aliases_out;
    record->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    record->add_option("--sources", sources, "directory holding the contract sources (default: scenario's parent's parent)");
    record->add_option("--out", record_out, "fixture file (default stdout)");
    record->add_option("--aliases", aliases_out, "write deployment aliases as JSON");

    // serve
    auto* serve = app.add_subcommand("serve", "serve a fixture stream over HTTP until interrupted");
    std::string fixture, host = "127.0.0.1";
    int port = 0;
    std::vector<std::string> truncate;
    serve->add_option("fixture", fixture, "fixture file")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 picks a free one)");
    serve->add_option("--truncate", truncate, "cut responses of these actions in half");

    std::string aliases_file;

    // fetch
    auto* fetch = app.add_subcommand("fetch", "download a contract's history bundle");
    ConfigFlags fetch_flags;
    fetch_flags.attach(fetch);
    std::string fetch_address;
    fetch->add_option("address", fetch_address, "contract address (0x-hex or @alias)")->required();
    fetch->add_option("--aliases", aliases_file, "alias file written by record");

    // gen
    auto* gen = app.add_subcommand("gen", "generate the replay plan and test box from a bundle");
    ConfigFlags gen_flags;
    gen_flags.attach(gen);
    std::string bundle_file;
    gen->add_option("--bundle", bundle_file, "bundle.json")->required()->check(CLI::ExistingFile);

    // replay
    auto* replay = app.add_subcommand("replay", "replay a plan and write outcomes, accuracy and matrices");
    ConfigFlags replay_flags;
    replay_flags.attach(replay);
    std::string plan_file;
    replay->add_option("--plan", plan_file, "plan.json; its contract source is resolved next to it")->required()->check(CLI::ExistingFile);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "corpus statistics over already fetched bundles");
    ConfigFlags analyze_flags;
    analyze_flags.attach(analyze);
    std::vector<std::string> bundle_paths;
    analyze->add_option("bundles", bundle_paths, "bundle files or directories searched for bundle.json")->required();

    // viz
    auto* viz_cmd = app.add_subcommand("viz", "render a matrix CSV as an SVG heat map or balance plot");
    std::string csv_file, svg_out, threshold, balance_label;
    viz_cmd->add_option("csv", csv_file, "matrix CSV")->required()->check(CLI::ExistingFile);
    viz_cmd->add_option("--out", svg_out, "SVG file (default: CSV name with .svg)");
    viz_cmd->add_option("--threshold", threshold, "threshold palette: cells above the value are highlighted");
    viz_cmd->add_option("--balance", balance_label, "draw a balance line plot with this account label");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "fetch, generate, replay and report one contract");
    ConfigFlags pipe_flags;
    pipe_flags.attach(pipe);
    std::string pipe_address;
    pipe->add_option("address", pipe_address, "contract address (0x-hex or @alias)")->required();
    pipe->add_option("--aliases", aliases_file, "alias file written by record");

    // corpus
    auto* corpus = app.add_subcommand("corpus", "evaluate many contracts and write the corpus report");
    ConfigFlags corpus_flags;
    corpus_flags.attach(corpus);
    std::vector<std::string> corpus_addresses;
    corpus->add_option("addresses", corpus_addresses, "contract addresses (0x-hex or @alias); default: every alias");
    corpus->add_option("--aliases", aliases_file, "alias file written by record");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*record) {
            const fs::path sc = scenario;
            const fs::path src = sources.empty() ? sc.parent_path().parent_path() : fs::path(sources);
            const auto text = pipeline::record_fixture(sc, src, aliases_out.empty() ? std::nullopt : std::optional<fs::path>(aliases_out));
            if (record_out.empty()) {
                std::cout << text;
            } else {
                pipeline::write_file(record_out, text);
            }
            return 0;
        }
        if (*serve) {
            explorer::ServerOptions opts;
            opts.host = host;
            opts.port = port;
            opts.truncate_actions = {truncate.begin(), truncate.end()};
            explorer::Server server(explorer::FixtureStore::from_text(pipeline::read_file(fixture)), opts);
            server.start();
            std::cout << server.url() << std::endl;
            server.wait();
            return 0;
        }
        if (*fetch) {
            const auto cfg = fetch_flags.resolve();
            pipeline::stage_fetch(cfg, resolve_address(fetch_address, load_aliases(aliases_file)), cfg.out);
            std::cout << (cfg.out / "bundle.json").string() << "\n";
            return 0;
        }
        if (*gen) {
            const auto cfg = gen_flags.resolve();
            const auto bundle = explorer::bundle_from_json(chain::Json::parse(pipeline::read_file(bundle_file)));
            const auto g = pipeline::stage_gen(cfg, bundle, cfg.out);
            std::cout << "plan " << (cfg.out / "plan.json").string() << ": " << g.plan.T() << " transactions, " << g.discovered.size()
                      << " discovered addresses\n";
            return 0;
        }
        if (*replay) {
            const auto cfg = replay_flags.resolve();
            const fs::path pf = plan_file;
            const auto j = chain::Json::parse(pipeline::read_file(pf));
            const auto plan = scriptgen::plan_from_json(j, pipeline::read_file(pf.parent_path() / j.at("source").get<std::string>()));
            const auto r = pipeline::stage_replay(cfg, plan, cfg.out);
            const auto cat = pipeline::stage_report(cfg, plan, r, std::nullopt, {}, cfg.out);
            std::cout << pipeline::read_file(cfg.out / "summary.txt");
            return cat == replayer::Category::kPerfect ? 0 : 1;
        }
        if (*analyze) {
            const auto cfg = analyze_flags.resolve();
            const auto report = analytics::analyze_corpus(load_bundles(bundle_paths), cfg.sensitivity_Ts, cfg.eval_options());
            pipeline::write_corpus_report(report, cfg.out);
            std::cout << analytics::text_report(report);
            return 0;
        }
        if (*viz_cmd) {
            const fs::path in = csv_file;
            const auto m = viz::parse_csv(pipeline::read_file(in), in.stem().string());
            std::string svg;
            if (!balance_label.empty()) {
                svg = viz::balance_plot({viz::balance_series(m, balance_label)}, in.stem().string());
            } else {
                viz::HeatmapSpec spec;
                spec.title = in.stem().string();
                if (!threshold.empty()) spec.palette = viz::Palette::threshold_at(word_from_string(threshold));
                svg = viz::heatmap(m, spec);
            }
            fs::path out = svg_out.empty() ? fs::path(in).replace_extension(".svg") : fs::path(svg_out);
            pipeline::write_file(out, svg);
            std::cout << out.string() << "\n";
            return 0;
        }
        if (*pipe) {
            const auto cfg = pipe_flags.resolve();
            const auto res = pipeline::run_pipeline(cfg, resolve_address(pipe_address, load_aliases(aliases_file)));
            if (res.failed_stage) {
                std::cerr << "replaylab: stage " << *res.failed_stage << " failed: " << res.error << "\n";
            } else {
                std::cout << pipeline::read_file(cfg.out / "summary.txt");
            }
            return res.exit_code;
        }
        if (*corpus) {
            const auto cfg = corpus_flags.resolve();
            const auto aliases = load_aliases(aliases_file);
            std::vector<Address> list;
            for (const auto& a : corpus_addresses) list.push_back(resolve_address(a, aliases));
            if (corpus_addresses.empty()) {
                for (const auto& [_, a] : aliases) list.push_back(a);
            }
            if (list.empty()) throw std::invalid_argument("no contracts given");
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            const auto res = pipeline::run_corpus(cfg, list);
            std::cout << pipeline::read_file(cfg.out / "report.txt");
            return 0;
        }
    } catch (const pipeline::StageError& e) {
        return report_stage(e);
    } catch (const std::exception& e) {
        std::cerr << "replaylab: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
