// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/explorer/fixture.hpp>

#include <sstream>

namespace replaylab::explorer {

FixtureError::FixtureError(std::size_t line, const std::string& what)
    : std::runtime_error("fixture line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

    Json envelope(const Json& result) { return {{"status", "1"}, {"message", "OK"}, {"result", result}}; }
    Json not_found() { return {{"status", "0"}, {"message", "No records found"}, {"result", Json::array()}}; }
    Json bad_request(const std::string& why) { return {{"status", "0"}, {"message", "NOTOK"}, {"result", why}}; }

    Json strip_kind(Json j) {
        j.erase("kind");
        return j;
    }

    const std::string& param(const std::map<std::string, std::string>& p, const std::string& key) {
        auto it = p.find(key);
        if (it == p.end()) throw std::invalid_argument("missing parameter '" + key + "'");
        return it->second;
    }

}  // namespace

FixtureStore FixtureStore::from_text(const std::string& text) {
    std::istringstream in(text);
    return load(in);
}

FixtureStore FixtureStore::load(std::istream& in) {
    FixtureStore s;
    std::string line;
    std::size_t n = 0;
    bool saw_meta = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            Json j = Json::parse(line);
            if (!j.is_object() || !j.contains("kind")) throw FixtureError(n, "missing 'kind'");
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "meta") {
                if (j.value("format", "") != "replaylab-chain") throw FixtureError(n, "unsupported format");
                saw_meta = true;
            } else if (kind == "account" || kind == "block") {
                if (kind == "block") (void)chain::block_from_json(j);
            } else if (kind == "tx") {
                const auto rec = chain::tx_record_from_json(j);
                s.tx_pos_[rec.tx.hash] = s.txs_.size();
                s.txs_.push_back(strip_kind(j));
            } else if (kind == "internal_tx") {
                const auto it = chain::internal_tx_from_json(j);
                if (!it.parent_tx) throw FixtureError(n, "internal transaction without parent");
                s.internal_[*it.parent_tx].push_back(strip_kind(j));
                s.internal_order_.push_back(strip_kind(j));
            } else if (kind == "log") {
                (void)chain::event_from_json(j);
                s.logs_.push_back(strip_kind(j));
            } else if (kind == "balance") {
                const Address a = Address::from_hex(j.at("address").get<std::string>());
                (void)word_from_string(j.at("balance").get<std::string>());
                s.balances_[a].emplace_back(j.at("block").get<std::uint64_t>(), j.at("balance").get<std::string>());
            } else if (kind == "contract") {
                (void)chain::interface_from_json(j.at("interface"));
                const Address a = Address::from_hex(j.at("address").get<std::string>());
                s.contracts_[a] = strip_kind(j);
            } else {
                throw FixtureError(n, "unknown kind '" + kind + "'");
            }
        } catch (const FixtureError&) {
            throw;
        } catch (const std::exception& e) {
            throw FixtureError(n, e.what());
        }
    }
    if (!saw_meta) throw FixtureError(n, "no meta record");
    return s;
}

std::vector<Address> FixtureStore::contract_addresses() const {
    std::vector<Address> out;
    for (const auto& [a, _] : contracts_) out.push_back(a);
    return out;
}

Json FixtureStore::query(const std::map<std::string, std::string>& p) const {
    try {
        const std::string& module = param(p, "module");
        const std::string& action = param(p, "action");
        if (module == "contract" && action == "getsourcecode") return source_code(Address::from_hex(param(p, "address")));
        if (module == "account" && action == "txlist") {
            std::size_t limit = 0;
            if (auto it = p.find("limit"); it != p.end()) limit = std::stoull(it->second);
            return tx_list(Address::from_hex(param(p, "address")), limit);
        }
        if (module == "logs" && action == "getLogs") return logs(Address::from_hex(param(p, "address")));
        if (module == "account" && action == "balancehistory") {
            return balance(Address::from_hex(param(p, "address")), std::stoull(param(p, "blockno")));
        }
        if (module == "account" && action == "txlistinternal") {
            if (p.contains("txhash")) return internal_by_tx(Hash32::from_hex(param(p, "txhash")));
            return internal_by_address(Address::from_hex(param(p, "address")));
        }
        if (module == "proxy" && action == "eth_getTransactionByHash") return tx_by_hash(Hash32::from_hex(param(p, "txhash")));
        return bad_request("unknown module/action '" + module + "/" + action + "'");
    } catch (const std::exception& e) {
        return bad_request(e.what());
    }
}

Json FixtureStore::source_code(const Address& a) const {
    auto it = contracts_.find(a);
    if (it == contracts_.end()) return not_found();
    const Json& c = it->second;
    return envelope({{"contract_name", c.at("name")},
                     {"source", c.at("source")},
                     {"interface", c.at("interface")},
                     {"creation_tx_hash", c.at("creation_tx_hash")},
                     {"created_internal", c.at("created_internal")}});
}

Json FixtureStore::tx_list(const Address& a, std::size_t limit) const {
    Json out = Json::array();
    const std::string hex = a.hex();
    for (const auto& t : txs_) {
        if (limit != 0 && out.size() >= limit) break;
        if (t.at("to").is_string() && t.at("to").get<std::string>() == hex) out.push_back(t);
    }
    if (out.empty()) return not_found();
    return envelope(out);
}

Json FixtureStore::logs(const Address& a) const {
    Json out = Json::array();
    const std::string hex = a.hex();
    for (const auto& l : logs_) {
        if (l.at("emitter").get<std::string>() == hex) out.push_back(l);
    }
    if (out.empty()) return not_found();
    return envelope(out);
}

Json FixtureStore::balance(const Address& a, std::uint64_t block) const {
    auto it = balances_.find(a);
    if (it == balances_.end()) return not_found();
    std::string value = "0";
    for (const auto& [b, v] : it->second) {
        if (b > block) break;
        value = v;
    }
    return envelope(value);
}

Json FixtureStore::internal_by_tx(const Hash32& h) const {
    if (!tx_pos_.contains(h)) return not_found();
    auto it = internal_.find(h);
    return envelope(it == internal_.end() ? Json::array() : Json(it->second));
}

Json FixtureStore::internal_by_address(const Address& a) const {
    Json out = Json::array();
    const std::string hex = a.hex();
    auto matches = [&](const Json& j, const char* key) { return j.at(key).is_string() && j.at(key).get<std::string>() == hex; };
    for (const auto& it : internal_order_) {
        if (matches(it, "from") || matches(it, "to") || matches(it, "contract_address")) out.push_back(it);
    }
    if (out.empty()) return not_found();
    return envelope(out);
}

Json FixtureStore::tx_by_hash(const Hash32& h) const {
    auto it = tx_pos_.find(h);
    if (it == tx_pos_.end()) return not_found();
    return envelope(txs_[it->second]);
}

}  // namespace replaylab::explorer
