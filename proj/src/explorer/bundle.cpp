// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/explorer/bundle.hpp>

#include <set>

namespace replaylab::explorer {

HistoricBundle HistoricBundle::prefix(std::size_t t) const {
    HistoricBundle out = *this;
    if (t >= transactions.size()) return out;
    out.transactions.resize(t);
    std::set<Hash32> kept;
    std::set<std::uint64_t> blocks;
    for (const auto& r : out.transactions) {
        kept.insert(r.tx.hash);
        blocks.insert(r.receipt.block_number);
    }
    std::erase_if(out.event_logs, [&](const chain::EventRecord& e) { return !kept.contains(e.tx_hash); });
    std::erase_if(out.internal_trace, [&](const auto& kv) { return !kept.contains(kv.first); });
    std::erase_if(out.balances, [&](const auto& kv) { return !blocks.contains(kv.first.second); });
    out.requested_T = t;
    out.clamped = false;
    return out;
}

Json bundle_to_json(const HistoricBundle& b) {
    Json args = Json::array();
    for (const auto& a : b.creation.args) args.push_back(chain::value_to_json(a));
    Json txs = Json::array();
    for (const auto& r : b.transactions) {
        Json j = chain::tx_record_to_json(r);
        Json events = Json::array();
        for (const auto& e : r.receipt.events) events.push_back(chain::event_to_json(e));
        Json internal = Json::array();
        for (const auto& it : r.receipt.internal_txs) internal.push_back(chain::internal_tx_to_json(it));
        j["events"] = events;
        j["internal_txs"] = internal;
        txs.push_back(j);
    }
    Json logs = Json::array();
    for (const auto& e : b.event_logs) logs.push_back(chain::event_to_json(e));
    Json balances = Json::array();
    for (const auto& [key, v] : b.balances) {
        balances.push_back({{"address", key.first.hex()}, {"block", key.second}, {"balance", word_to_dec(v)}});
    }
    Json incoming = Json::array();
    for (const auto& it : b.incoming_internal) incoming.push_back(chain::internal_tx_to_json(it));
    return {{"format", "replaylab-bundle"},
            {"version", 1},
            {"contract_address", b.contract_address.hex()},
            {"contract_name", b.contract_name},
            {"source", b.source},
            {"interface", chain::interface_to_json(b.iface)},
            {"creation",
             {{"tx_hash", b.creation.tx_hash.hex()},
              {"internal", b.creation.internal},
              {"from", b.creation.from.hex()},
              {"args", args},
              {"value", word_to_dec(b.creation.value)},
              {"block_number", b.creation.block_number},
              {"timestamp", b.creation.timestamp},
              {"gas_limit", b.creation.gas_limit}}},
            {"transactions", txs},
            {"event_logs", logs},
            {"balances", balances},
            {"incoming_internal", incoming},
            {"requested_T", b.requested_T},
            {"clamped", b.clamped},
            {"partial", b.partial},
            {"partial_reasons", b.partial_reasons}};
}

HistoricBundle bundle_from_json(const Json& j) {
    if (j.value("format", "") != "replaylab-bundle") throw std::runtime_error("not a bundle document");
    HistoricBundle b;
    b.contract_address = Address::from_hex(j.at("contract_address").get<std::string>());
    b.contract_name = j.at("contract_name").get<std::string>();
    b.source = j.at("source").get<std::string>();
    b.iface = chain::interface_from_json(j.at("interface"));
    const Json& c = j.at("creation");
    b.creation.tx_hash = Hash32::from_hex(c.at("tx_hash").get<std::string>());
    b.creation.internal = c.at("internal").get<bool>();
    b.creation.from = Address::from_hex(c.at("from").get<std::string>());
    for (const auto& a : c.at("args")) b.creation.args.push_back(chain::value_from_json(a));
    b.creation.value = word_from_string(c.at("value").get<std::string>());
    b.creation.block_number = c.at("block_number").get<std::uint64_t>();
    b.creation.timestamp = c.at("timestamp").get<std::uint64_t>();
    b.creation.gas_limit = c.at("gas_limit").get<std::uint64_t>();
    for (const auto& t : j.at("transactions")) {
        chain::TxRecord r = chain::tx_record_from_json(t);
        for (const auto& e : t.at("events")) r.receipt.events.push_back(chain::event_from_json(e));
        for (const auto& it : t.at("internal_txs")) r.receipt.internal_txs.push_back(chain::internal_tx_from_json(it));
        if (!r.receipt.internal_txs.empty()) b.internal_trace[r.tx.hash] = r.receipt.internal_txs;
        b.transactions.push_back(std::move(r));
    }
    for (const auto& e : j.at("event_logs")) b.event_logs.push_back(chain::event_from_json(e));
    for (const auto& x : j.at("balances")) {
        b.balances[{Address::from_hex(x.at("address").get<std::string>()), x.at("block").get<std::uint64_t>()}] =
            word_from_string(x.at("balance").get<std::string>());
    }
    for (const auto& it : j.at("incoming_internal")) b.incoming_internal.push_back(chain::internal_tx_from_json(it));
    b.requested_T = j.at("requested_T").get<std::size_t>();
    b.clamped = j.at("clamped").get<bool>();
    b.partial = j.at("partial").get<bool>();
    b.partial_reasons = j.value("partial_reasons", std::vector<std::string>{});
    return b;
}

}  // namespace replaylab::explorer
