// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/replayer/replay.hpp>

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>

namespace replaylab::replayer {

using chain::Status;
using chain::Value;
using scriptgen::TestPlan;

Schedule Schedule::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    auto num = [&](std::size_t i) { return std::stoull(parts.at(i)); };
    try {
        if (parts.size() == 1 && parts[0] == "historic") return historic();
        if (parts.size() == 3 && parts[0] == "sequential") return sequential(num(1), num(2));
        if (parts.size() == 2 && parts[0] == "offset") return offset(std::stoll(parts[1]));
    } catch (const std::logic_error&) {
        // fall through to the error below
    }
    throw std::invalid_argument("bad schedule '" + text + "'");
}

std::uint64_t Schedule::at(std::size_t index, std::uint64_t historic_ts) const {
    switch (kind) {
        case Kind::kSequential:
            return start + stride * index;
        case Kind::kOffset:
            return static_cast<std::uint64_t>(static_cast<std::int64_t>(historic_ts) + delta);
        case Kind::kExplicit:
            return list.at(index);
        default:
            return historic_ts;
    }
}

std::string Schedule::label() const {
    switch (kind) {
        case Kind::kSequential:
            return "sequential-" + std::to_string(start) + "-" + std::to_string(stride);
        case Kind::kOffset:
            return "offset-" + std::to_string(delta);
        case Kind::kExplicit:
            return "explicit-" + DigestBuilder{}.add("schedule").add(Json(list).dump()).finish().hex().substr(2, 12);
        default:
            return "historic";
    }
}

const Schedule& RunConfig::schedule_for(std::size_t run) const {
    auto it = run_schedules.find(run);
    return it == run_schedules.end() ? schedule : it->second;
}

void RunConfig::validate(std::size_t steps) const {
    if (runs == 0) throw std::invalid_argument("at least one replay run is required");
    auto check = [&](const Schedule& s) {
        if (s.kind == Schedule::Kind::kExplicit && s.list.size() < steps) {
            throw std::invalid_argument("explicit schedule has " + std::to_string(s.list.size()) + " timestamps for " +
                                        std::to_string(steps) + " steps");
        }
    };
    check(schedule);
    for (const auto& [_, s] : run_schedules) check(s);
}

std::vector<std::size_t> tracked_accounts(const TestPlan& plan) {
    std::set<std::size_t> refs;
    for (const auto& s : plan.txs) refs.insert(s.balance_queries.begin(), s.balance_queries.end());
    return {refs.begin(), refs.end()};
}

namespace {

    std::vector<Value> resolve_args(const TestPlan& plan, const std::vector<scriptgen::PlanArg>& args, const Address& deployed) {
        std::vector<Value> out;
        for (const auto& a : args) out.push_back(scriptgen::resolve_arg(plan.address_map, a, deployed));
        return out;
    }

    class Runner {
      public:
        Runner(const TestPlan& plan, const RunConfig& cfg, std::size_t run)
            : plan_(plan), schedule_(cfg.schedule_for(run)), state_(genesis(plan, cfg)) {
            out_.run = run;
            out_.schedule = schedule_.label();
        }

        ReplayRun run() {
            if (!deploy()) return std::move(out_);
            const auto tracked = tracked_accounts(plan_);
            std::uint64_t ts = deploy_ts_;
            for (const auto& s : plan_.txs) {
                // block timestamps never run backwards; earlier schedule entries are clamped
                ts = std::max(ts, schedule_.at(s.index, s.timestamp));
                StepOutcome o = step(s, ts);
                for (auto ref : tracked) o.balances[ref] = state_.balance(plan_.address_map.replay(ref, out_.deployed));
                out_.outcomes.push_back(std::move(o));
            }
            for (const auto& g : plan_.getters) {
                GetterOutcome r{g.method, resolve_args(plan_, g.args, out_.deployed), std::nullopt, std::nullopt};
                try {
                    r.result = state_.call_pure(out_.deployed, g.method, r.args);
                } catch (const std::exception& e) {
                    r.error = e.what();
                }
                out_.getters.push_back(std::move(r));
            }
            return std::move(out_);
        }

      private:
        static chain::WorldState genesis(const TestPlan& plan, const RunConfig& cfg) {
            std::vector<std::pair<Address, Word>> e;
            for (std::size_t ref = scriptgen::kReservedEntries; ref < plan.address_map.size(); ++ref) {
                if (plan.address_map.creation_nonce(ref)) continue;  // appears when the contract creates it
                e.emplace_back(scriptgen::replay_pool_address(ref), cfg.endowment);
            }
            chain::ChainConfig cc;
            cc.gas_price = cfg.gas_price;
            return chain::WorldState::genesis(e, cc);
        }

        bool deploy() {
            const auto& d = plan_.deploy;
            const Address from = plan_.address_map.replay(d.from, {});
            const auto* acc = state_.account(from);
            out_.deployed = chain::WorldState::create_address(from, acc ? acc->nonce : 0);
            // historic and offset schedules move the deployment with history; the others pin it to step 0
            if (schedule_.kind == Schedule::Kind::kHistoric || schedule_.kind == Schedule::Kind::kOffset || plan_.txs.empty()) {
                deploy_ts_ = schedule_.at(0, d.timestamp);
            } else {
                deploy_ts_ = schedule_.at(0, plan_.txs.front().timestamp);
            }
            chain::Transaction tx;
            try {
                auto unit = mcl::parse(plan_.source);
                std::map<Address, Address> table;
                for (const auto& l : mcl::static_flags(unit).literal_addresses) {
                    if (auto ref = plan_.address_map.find(l.address)) table[l.address] = plan_.address_map.replay(*ref, out_.deployed);
                }
                unit = mcl::substitute_literals(std::move(unit), table);
                tx.code = std::make_shared<const mcl::CompiledContract>(mcl::compile_contract(unit, plan_.contract_name));
                tx.source = unit.raw_text;
            } catch (const std::exception& e) {
                out_.deploy_error = std::string("compile: ") + e.what();
                return false;
            }
            tx.from = from;
            tx.contract_name = plan_.contract_name;
            tx.args = resolve_args(plan_, d.args, out_.deployed);
            tx.value = d.value;
            tx.gas_limit = d.gas_limit;
            try {
                state_.submit(std::move(tx));
            } catch (const std::exception& e) {
                out_.deploy_error = e.what();
                return false;
            }
            auto [block, receipts] = state_.mine_block(deploy_ts_);
            const auto& r = receipts.at(0);
            collect_casts(r.tx_hash);
            if (r.status != Status::kSuccess || r.contract_address != out_.deployed) {
                out_.deploy_error = r.failure_reason.value_or(chain::status_name(r.status));
                return false;
            }
            out_.deploy_ok = true;
            return true;
        }

        StepOutcome step(const scriptgen::TxStep& s, std::uint64_t ts) {
            StepOutcome o;
            o.index = s.index;
            o.forced = s.force_fail;
            o.executed = true;
            chain::Transaction tx;
            tx.from = s.force_fail ? s.illegal_from : plan_.address_map.replay(s.from, out_.deployed);
            tx.to = plan_.address_map.replay(s.to, out_.deployed);
            tx.method = s.method;
            tx.args = resolve_args(plan_, s.args, out_.deployed);
            tx.value = s.value;
            tx.gas_limit = s.gas_limit;
            try {
                state_.submit(std::move(tx));
            } catch (const chain::ChainError& e) {
                // Rejected before execution: recorded as a failure, and the block stays empty.
                o.status = Status::kFailed;
                o.failure_reason = dynamic_cast<const chain::UnknownSender*>(&e) ? "unknown sender" : e.what();
                state_.mine_block(ts);
                return o;
            }
            auto [block, receipts] = state_.mine_block(ts);
            auto& r = receipts.at(0);
            o.status = r.status;
            o.gas_used = r.gas_used;
            o.failure_reason = r.failure_reason;
            o.events = std::move(r.events);
            if (const auto* t = state_.trace(r.tx_hash)) {
                o.executed_instructions = t->executed_indices(out_.deployed);
                o.path = t->executed;
            }
            collect_casts(r.tx_hash);
            return o;
        }

        void collect_casts(const Hash32& h) {
            const auto* t = state_.trace(h);
            if (!t) return;
            for (const auto& c : t->address_casts) {
                if (c.decoded.is_zero() || state_.account(c.decoded)) continue;
                if (plan_.address_map.find_replay(c.decoded, out_.deployed)) continue;
                out_.unmapped_casts.insert(c.decoded);
            }
        }

        const TestPlan& plan_;
        const Schedule& schedule_;
        chain::WorldState state_;
        ReplayRun out_;
        std::uint64_t deploy_ts_{0};
    };

}  // namespace

ReplayRun replay(const TestPlan& plan, const RunConfig& config, std::size_t run_index) {
    config.validate(plan.T());
    return Runner{plan, config, run_index}.run();
}

std::vector<ReplayRun> replay_all(const TestPlan& plan, const RunConfig& config) {
    config.validate(plan.T());
    std::vector<std::future<ReplayRun>> jobs;
    for (std::size_t i = 0; i < config.runs; ++i) {
        jobs.push_back(std::async(std::launch::async, [&plan, &config, i] { return Runner{plan, config, i}.run(); }));
    }
    std::vector<ReplayRun> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::set<Address> discovery_pass(const TestPlan& plan, const RunConfig& config) {
    RunConfig once = config;
    once.runs = 1;
    once.run_schedules.clear();
    return replay(plan, once, 0).unmapped_casts;
}

// ---------------------------------------------------------------------------
// Accuracy

std::string category_name(Category c) {
    switch (c) {
        case Category::kFailed:
            return "failed";
        case Category::kIntermediate:
            return "intermediate";
        default:
            return "perfect";
    }
}

bool status_agrees(const StepOutcome& o, const scriptgen::TxStep& s) {
    if (!o.executed) return false;
    if (s.force_fail) return o.status != Status::kSuccess;
    return o.status == s.expected_status;
}

namespace {

    using EventKey = std::pair<std::string, std::vector<std::tuple<std::string, int, Word>>>;

    std::vector<EventKey> replayed_events(const StepOutcome& o, const Address& deployed) {
        std::vector<EventKey> out;
        for (const auto& e : o.events) {
            if (e.emitter != deployed) continue;
            EventKey k{e.name, {}};
            for (const auto& p : e.params) k.second.emplace_back(p.name, static_cast<int>(p.type), p.value);
            out.push_back(std::move(k));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<EventKey> expected_events(const scriptgen::TxStep& s, const scriptgen::AddressMap& map, const Address& deployed) {
        std::vector<EventKey> out;
        for (const auto& e : s.expected_events) {
            EventKey k{e.name, {}};
            for (const auto& p : e.params) k.second.emplace_back(p.name, static_cast<int>(p.type), scriptgen::resolve_word(map, p.value, deployed));
            out.push_back(std::move(k));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    AccuracyResult accuracy(AccuracyResult::Kind kind, const ReplayRun& run, const TestPlan& plan,
                            const std::function<bool(const StepOutcome&, const scriptgen::TxStep&)>& agrees) {
        AccuracyResult r{kind, 0, plan.T(), Category::kFailed};
        if (!run.deploy_ok) return r;
        if (run.outcomes.size() != plan.txs.size()) throw std::logic_error("run does not match plan length");
        while (r.t < r.T && agrees(run.outcomes[r.t], plan.txs[r.t])) ++r.t;
        r.category = r.t == r.T ? Category::kPerfect : Category::kIntermediate;
        return r;
    }

}  // namespace

bool events_agree(const StepOutcome& o, const scriptgen::TxStep& s, const scriptgen::AddressMap& map, const Address& deployed) {
    if (!o.executed) return false;
    if (s.force_fail) return o.status != Status::kSuccess && replayed_events(o, deployed).empty();
    if (s.expected_status == Status::kSuccess && o.status != Status::kSuccess) return false;
    return replayed_events(o, deployed) == expected_events(s, map, deployed);
}

AccuracyResult status_accuracy(const ReplayRun& run, const TestPlan& plan) {
    return accuracy(AccuracyResult::Kind::kStatus, run, plan, status_agrees);
}

AccuracyResult event_accuracy(const ReplayRun& run, const TestPlan& plan) {
    return accuracy(AccuracyResult::Kind::kEvent, run, plan, [&](const StepOutcome& o, const scriptgen::TxStep& s) {
        return events_agree(o, s, plan.address_map, run.deployed);
    });
}

Value historic_value(const scriptgen::AddressMap& map, const Address& deployed, const Value& v) {
    if (v.type != mcl::Type::kAddress) return v;
    if (auto ref = map.find_replay(Address::from_word(v.word), deployed)) return Value::address(map.historic(*ref));
    return v;
}

// ---------------------------------------------------------------------------
// Matrices

Word status_code(Status s) {
    switch (s) {
        case Status::kFailed:
            return 0;
        case Status::kOutOfGas:
            return 1;
        default:
            return 2;
    }
}

std::vector<OutputMatrix> collect_matrices(const std::vector<ReplayRun>& runs, const TestPlan& plan,
                                           const std::vector<std::string>& tracked) {
    const std::size_t T = plan.T();
    const std::size_t R = runs.size();
    for (const auto& r : runs) {
        if (r.deploy_ok && r.outcomes.size() != T) throw std::logic_error("run " + std::to_string(r.run) + " has mismatched length");
    }
    std::map<std::string, OutputMatrix> m;
    auto cell = [&](const std::string& name) -> OutputMatrix& {
        auto it = m.find(name);
        if (it == m.end()) it = m.emplace(name, OutputMatrix{name, T, R}).first;
        return it->second;
    };
    cell("gas_used");
    cell("status");
    for (auto ref : tracked_accounts(plan)) cell("balance:" + std::to_string(ref));
    for (const auto& s : plan.txs) {
        for (const auto& e : s.expected_events) {
            for (const auto& p : e.params) cell("event:" + e.name + "." + p.name);
        }
    }
    for (std::size_t c = 0; c < R; ++c) {
        const auto& run = runs[c];
        for (const auto& o : run.outcomes) {
            if (!o.executed) continue;
            if (o.gas_used) cell("gas_used").at(o.index, c) = *o.gas_used;
            cell("status").at(o.index, c) = status_code(o.status);
            for (const auto& [ref, bal] : o.balances) cell("balance:" + std::to_string(ref)).at(o.index, c) = bal;
            std::set<std::string> seen;
            for (const auto& e : o.events) {
                if (e.emitter != run.deployed) continue;
                for (const auto& p : e.params) {
                    const std::string name = "event:" + e.name + "." + p.name;
                    if (!seen.insert(name).second) continue;  // first emission per step
                    Word w = p.value;
                    if (p.type == mcl::Type::kAddress) {
                        if (auto ref = plan.address_map.find_replay(Address::from_word(w), run.deployed)) w = *ref;
                    }
                    cell(name).at(o.index, c) = w;
                }
            }
        }
    }
    std::vector<OutputMatrix> out;
    for (auto& [name, mat] : m) {
        if (tracked.empty() || std::find(tracked.begin(), tracked.end(), name) != tracked.end()) out.push_back(std::move(mat));
    }
    return out;
}

std::string run_to_jsonl(const ReplayRun& run, const TestPlan& plan) {
    std::string out;
    auto line = [&](const Json& j) { out += j.dump() + "\n"; };
    Json d{{"kind", "deploy"},
           {"run", run.run},
           {"contract", plan.contract_name},
           {"schedule", run.schedule},
           {"deploy_ok", run.deploy_ok},
           {"address", run.deployed.hex()}};
    if (run.deploy_error) d["error"] = *run.deploy_error;
    line(d);
    for (const auto& o : run.outcomes) {
        Json events = Json::array();
        for (const auto& e : o.events) events.push_back(chain::event_to_json(e));
        Json balances = Json::object();
        for (const auto& [ref, b] : o.balances) balances[std::to_string(ref)] = word_to_dec(b);
        Json j{{"kind", "step"},
               {"run", run.run},
               {"step", o.index},
               {"forced", o.forced},
               {"status", chain::status_name(o.status)},
               {"gas_used", o.gas_used ? Json(*o.gas_used) : Json()},
               {"events", events},
               {"balances", balances},
               {"failure_reason", o.failure_reason ? Json(*o.failure_reason) : Json()}};
        line(j);
    }
    for (const auto& g : run.getters) {
        Json args = Json::array();
        for (const auto& a : g.args) args.push_back(chain::value_to_json(a));
        Json j{{"kind", "getter"}, {"run", run.run}, {"method", g.method}, {"args", args}};
        if (g.result) {
            Json res = Json::array();
            for (const auto& v : *g.result) res.push_back(chain::value_to_json(v));
            j["result"] = res;
        } else {
            j["error"] = g.error.value_or("");
        }
        line(j);
    }
    return out;
}

}  // namespace replaylab::replayer
