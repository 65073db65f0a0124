// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/pipeline/scenario.hpp>

#include <fstream>
#include <sstream>

namespace replaylab::pipeline {

using chain::Json;
using chain::Transaction;
using chain::Value;
using mcl::Type;

ScenarioError::ScenarioError(long step, const std::string& what)
    : std::runtime_error(step < 0 ? what : "step " + std::to_string(step) + ": " + what), step_(step) {}

Address historic_eoa(std::uint64_t k) { return derive_address("historic-eoa", k); }

namespace {

    constexpr std::uint64_t kDefaultGasLimit = 3'000'000;

    std::string read_file(const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot read " + p.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    Word word_of(const Json& j) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_string()) return word_from_string(j.get<std::string>());
        throw std::runtime_error("expected an unsigned integer, got " + j.dump());
    }

    class Recorder {
      public:
        Recorder(const Json& scenario, std::filesystem::path dir) : doc_(scenario), dir_(std::move(dir)) {}

        RecordedChain run() {
            const std::uint64_t n = doc_.value("accounts", 0);
            const Word endowment = doc_.contains("endowment") ? word_of(doc_.at("endowment")) : Word{0};
            std::vector<std::pair<Address, Word>> e;
            for (std::uint64_t k = 0; k < n; ++k) e.emplace_back(historic_eoa(k), endowment);
            chain::ChainConfig cfg;
            if (doc_.contains("gas_price")) cfg.gas_price = word_of(doc_.at("gas_price"));
            RecordedChain out{chain::WorldState::genesis(e, cfg), {}};
            out_ = &out;
            const Json steps = doc_.value("steps", Json::array());
            for (std::size_t i = 0; i < steps.size(); ++i) {
                try {
                    step(steps[i]);
                } catch (const ScenarioError&) {
                    throw;
                } catch (const std::exception& ex) {
                    throw ScenarioError(static_cast<long>(i), ex.what());
                }
            }
            return out;
        }

      private:
        Address address_ref(const std::string& ref) const {
            if (ref.starts_with("$")) return historic_eoa(std::stoull(ref.substr(1)));
            if (ref.starts_with("@")) {
                auto it = out_->aliases.find(ref.substr(1));
                if (it == out_->aliases.end()) throw std::runtime_error("unknown alias '" + ref + "'");
                return it->second;
            }
            return Address::from_hex(ref);
        }

        Word uint_arg(const Json& j) const {
            if (!j.is_object()) return word_of(j);
            Word w = address_ref(j.at("address").get<std::string>()).to_word();
            if (j.contains("shl")) w = shift_left(w, j.at("shl").get<unsigned>());
            if (j.contains("mul")) w *= word_of(j.at("mul"));
            if (j.contains("add")) w += word_of(j.at("add"));
            return w;
        }

        Value arg(Type t, const Json& j) const {
            switch (t) {
                case Type::kBool:
                    return Value::boolean(j.get<bool>());
                case Type::kAddress:
                    return Value::address(address_ref(j.get<std::string>()));
                case Type::kUintArray: {
                    std::vector<Word> items;
                    for (const auto& x : j) items.push_back(uint_arg(x));
                    return Value::array(std::move(items));
                }
                case Type::kHash:
                    return {Type::kHash, word_of(j), {}};
                default:
                    return Value::uint(uint_arg(j));
            }
        }

        std::vector<Value> args(const std::vector<mcl::ParamInfo>& params, const Json& j) const {
            const Json list = j.is_null() ? Json::array() : j;
            if (list.size() != params.size()) {
                throw std::runtime_error("expected " + std::to_string(params.size()) + " arguments, got " +
                                         std::to_string(list.size()));
            }
            std::vector<Value> out;
            for (std::size_t i = 0; i < params.size(); ++i) out.push_back(arg(params[i].type, list[i]));
            return out;
        }

        Address sender(const Json& s) const {
            if (s.is_number_unsigned()) return historic_eoa(s.get<std::uint64_t>());
            return address_ref(s.get<std::string>());
        }

        void step(const Json& s) {
            auto& state = out_->state;
            if (s.contains("mine")) {
                state.mine_block(s.at("mine").get<std::uint64_t>());
                return;
            }
            Transaction tx;
            tx.from = sender(s.at("from"));
            tx.value = s.contains("value") ? word_of(s.at("value")) : Word{0};
            tx.gas_limit = s.value("gas_limit", kDefaultGasLimit);
            const std::uint64_t ts = s.at("timestamp").get<std::uint64_t>();
            if (s.contains("deploy")) {
                const std::string name = s.at("deploy").get<std::string>();
                auto main = mcl::parse(read_file(dir_ / s.at("source").get<std::string>()));
                if (s.contains("link")) {
                    std::map<Address, Address> table;
                    for (const auto& [placeholder, alias] : s.at("link").items()) {
                        table[Address::from_hex(placeholder)] = address_ref("@" + alias.get<std::string>());
                    }
                    main = mcl::substitute_literals(std::move(main), table);
                }
                std::string combined = main.raw_text;
                const Json with = s.value("with", Json::array());
                for (const auto& dep : with) {
                    combined += "\n" + read_file(dir_ / dep.get<std::string>());
                }
                const auto unit = mcl::parse(combined);
                tx.code = std::make_shared<const mcl::CompiledContract>(mcl::compile_contract(unit, name));
                tx.source = main.raw_text;
                tx.contract_name = name;
                tx.args = args(tx.code->iface.constructor.params, s.value("args", Json()));
            } else {
                const Address to = address_ref(s.at("to").get<std::string>());
                tx.to = to;
                tx.method = s.value("method", "");
                if (!tx.method.empty()) {
                    const auto* acc = state.account(to);
                    if (!acc || !acc->code) throw std::runtime_error("no contract at " + to.hex());
                    const auto* m = acc->code->find_method(tx.method);
                    if (!m) throw std::runtime_error("unknown method '" + tx.method + "'");
                    tx.args = args(m->params, s.value("args", Json()));
                }
            }
            state.submit(std::move(tx));
            auto [block, receipts] = state.mine_block(ts);
            const auto& r = receipts.at(0);
            const std::string expect = s.value("expect", "success");
            if (chain::status_name(r.status) != expect) {
                throw std::runtime_error("expected " + expect + ", got " + chain::status_name(r.status) +
                                         (r.failure_reason ? " (" + *r.failure_reason + ")" : ""));
            }
            if (s.contains("as")) {
                if (!r.contract_address) throw std::runtime_error("'as' on a step that created no contract");
                out_->aliases[s.at("as").get<std::string>()] = *r.contract_address;
            }
            const Json created_as = s.value("created_as", Json::object());
            for (const auto& [alias, index] : created_as.items()) {
                std::size_t seen = 0;
                for (const auto& it : r.internal_txs) {
                    if (it.created && seen++ == index.get<std::size_t>()) out_->aliases[alias] = *it.created;
                }
            }
        }

        const Json& doc_;
        std::filesystem::path dir_;
        RecordedChain* out_{nullptr};
    };

}  // namespace

RecordedChain record_scenario(const Json& scenario, const std::filesystem::path& source_dir) {
    if (!scenario.is_object()) throw ScenarioError(-1, "scenario must be an object");
    return Recorder{scenario, source_dir}.run();
}

RecordedChain record_scenario_file(const std::filesystem::path& scenario_file, const std::filesystem::path& source_dir) {
    Json doc;
    try {
        doc = Json::parse(read_file(scenario_file));
    } catch (const Json::parse_error& e) {
        throw ScenarioError(-1, scenario_file.string() + ": " + e.what());
    }
    return record_scenario(doc, source_dir);
}

}  // namespace replaylab::pipeline
