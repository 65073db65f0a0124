// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/chain/json.hpp>

namespace replaylab::chain {

using mcl::Type;

namespace {

    Type type_of(const Json& j) {
        const auto t = mcl::type_from_name(j.get<std::string>());
        if (!t) throw ChainError("unknown type '" + j.get<std::string>() + "'");
        return *t;
    }

    Json opt_address(const std::optional<Address>& a) { return a ? Json(a->hex()) : Json(nullptr); }

    std::optional<Address> opt_address_from(const Json& j, const char* key) {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return Address::from_hex(j.at(key).get<std::string>());
    }

    Json params_to_json(const std::vector<mcl::ParamInfo>& ps) {
        Json out = Json::array();
        for (const auto& p : ps) out.push_back({{"name", p.name}, {"type", mcl::type_name(p.type)}});
        return out;
    }

    std::vector<mcl::ParamInfo> params_from_json(const Json& j) {
        std::vector<mcl::ParamInfo> out;
        for (const auto& p : j) out.push_back({p.at("name").get<std::string>(), type_of(p.at("type"))});
        return out;
    }

    Json method_to_json(const mcl::MethodInfo& m) {
        Json rets = Json::array();
        for (auto t : m.returns) rets.push_back(mcl::type_name(t));
        return {{"name", m.name},          {"params", params_to_json(m.params)}, {"returns", rets},
                {"pure", m.pure},          {"payable", m.payable},               {"abstract", m.is_abstract}};
    }

    mcl::MethodInfo method_from_json(const Json& j) {
        mcl::MethodInfo m;
        m.name = j.at("name").get<std::string>();
        m.params = params_from_json(j.at("params"));
        for (const auto& t : j.at("returns")) m.returns.push_back(type_of(t));
        m.pure = j.at("pure").get<bool>();
        m.payable = j.at("payable").get<bool>();
        m.is_abstract = j.value("abstract", false);
        return m;
    }

    Json args_to_json(const std::vector<Value>& args) {
        Json out = Json::array();
        for (const auto& a : args) out.push_back(value_to_json(a));
        return out;
    }

    std::vector<Value> args_from_json(const Json& j) {
        std::vector<Value> out;
        for (const auto& a : j) out.push_back(value_from_json(a));
        return out;
    }

    std::string dump_line(const Json& j) { return j.dump() + "\n"; }

}  // namespace

Json value_to_json(const Value& v) {
    Json out{{"type", mcl::type_name(v.type)}};
    switch (v.type) {
        case Type::kBool:
            out["value"] = v.word != 0;
            break;
        case Type::kAddress:
            out["value"] = Address::from_word(v.word).hex();
            break;
        case Type::kHash:
            out["value"] = Hash32::from_word(v.word).hex();
            break;
        case Type::kUintArray: {
            Json items = Json::array();
            for (const auto& w : v.items) items.push_back(word_to_dec(w));
            out["value"] = items;
            break;
        }
        default:
            out["value"] = word_to_dec(v.word);
    }
    return out;
}

Value value_from_json(const Json& j) {
    Value v;
    v.type = type_of(j.at("type"));
    const Json& val = j.at("value");
    switch (v.type) {
        case Type::kBool:
            v.word = val.get<bool>() ? 1 : 0;
            break;
        case Type::kAddress:
            v.word = Address::from_hex(val.get<std::string>()).to_word();
            break;
        case Type::kHash:
            v.word = Hash32::from_hex(val.get<std::string>()).to_word();
            break;
        case Type::kUintArray:
            for (const auto& w : val) v.items.push_back(word_from_string(w.get<std::string>()));
            break;
        default:
            v.word = word_from_string(val.get<std::string>());
    }
    return v;
}

Json event_to_json(const EventRecord& e) {
    Json params = Json::array();
    for (const auto& p : e.params) {
        params.push_back({{"name", p.name}, {"type", mcl::type_name(p.type)}, {"value", value_to_json({p.type, p.value, {}})["value"]}});
    }
    return {{"emitter", e.emitter.hex()}, {"name", e.name},           {"params", params},
            {"tx_hash", e.tx_hash.hex()}, {"log_index", e.log_index}, {"block_number", e.block_number}};
}

EventRecord event_from_json(const Json& j) {
    EventRecord e;
    e.emitter = Address::from_hex(j.at("emitter").get<std::string>());
    e.name = j.at("name").get<std::string>();
    for (const auto& p : j.at("params")) {
        const Value v = value_from_json({{"type", p.at("type")}, {"value", p.at("value")}});
        e.params.push_back({p.at("name").get<std::string>(), v.type, v.word});
    }
    e.tx_hash = Hash32::from_hex(j.at("tx_hash").get<std::string>());
    e.log_index = j.at("log_index").get<std::uint64_t>();
    e.block_number = j.at("block_number").get<std::uint64_t>();
    return e;
}

Json internal_tx_to_json(const Transaction& t) {
    return {{"hash", t.hash.hex()},
            {"parent_tx", t.parent_tx ? Json(t.parent_tx->hex()) : Json(nullptr)},
            {"from", t.from.hex()},
            {"to", opt_address(t.to)},
            {"contract_address", opt_address(t.created)},
            {"contract_name", t.contract_name},
            {"value", word_to_dec(t.value)},
            {"method", t.method},
            {"args", args_to_json(t.args)}};
}

Transaction internal_tx_from_json(const Json& j) {
    Transaction t;
    t.hash = Hash32::from_hex(j.at("hash").get<std::string>());
    if (!j.at("parent_tx").is_null()) t.parent_tx = Hash32::from_hex(j.at("parent_tx").get<std::string>());
    t.from = Address::from_hex(j.at("from").get<std::string>());
    t.to = opt_address_from(j, "to");
    t.created = opt_address_from(j, "contract_address");
    t.contract_name = j.value("contract_name", "");
    t.value = word_from_string(j.at("value").get<std::string>());
    t.method = j.at("method").get<std::string>();
    t.args = args_from_json(j.at("args"));
    t.origin = Origin::kInternal;
    return t;
}

Json tx_record_to_json(const TxRecord& r) {
    Json j{{"hash", r.tx.hash.hex()},
           {"from", r.tx.from.hex()},
           {"to", opt_address(r.tx.to)},
           {"value", word_to_dec(r.tx.value)},
           {"gas_limit", r.tx.gas_limit},
           {"method", r.tx.method},
           {"args", args_to_json(r.tx.args)},
           {"block_number", r.receipt.block_number},
           {"timestamp", r.timestamp},
           {"status", status_name(r.receipt.status)},
           {"gas_used", r.receipt.gas_used},
           {"failure_reason", r.receipt.failure_reason ? Json(*r.receipt.failure_reason) : Json(nullptr)}};
    if (r.tx.is_create()) {
        j["contract_address"] = opt_address(r.tx.created);
        j["contract_name"] = r.tx.contract_name;
    }
    return j;
}

TxRecord tx_record_from_json(const Json& j) {
    TxRecord r;
    r.tx.hash = Hash32::from_hex(j.at("hash").get<std::string>());
    r.tx.from = Address::from_hex(j.at("from").get<std::string>());
    r.tx.to = opt_address_from(j, "to");
    r.tx.value = word_from_string(j.at("value").get<std::string>());
    r.tx.gas_limit = j.at("gas_limit").get<std::uint64_t>();
    r.tx.method = j.at("method").get<std::string>();
    r.tx.args = args_from_json(j.at("args"));
    r.tx.created = opt_address_from(j, "contract_address");
    r.tx.contract_name = j.value("contract_name", "");
    r.receipt.tx_hash = r.tx.hash;
    r.receipt.block_number = j.at("block_number").get<std::uint64_t>();
    r.timestamp = j.at("timestamp").get<std::uint64_t>();
    r.receipt.status = status_from_name(j.at("status").get<std::string>());
    r.receipt.gas_used = j.at("gas_used").get<std::uint64_t>();
    if (!j.at("failure_reason").is_null()) r.receipt.failure_reason = j.at("failure_reason").get<std::string>();
    r.receipt.contract_address = r.tx.created;
    return r;
}

Json interface_to_json(const mcl::InterfaceDescriptor& iface) {
    Json methods = Json::array();
    for (const auto& m : iface.methods) methods.push_back(method_to_json(m));
    Json events = Json::array();
    for (const auto& e : iface.events) events.push_back({{"name", e.name}, {"params", params_to_json(e.params)}});
    return {{"contract", iface.contract}, {"constructor", method_to_json(iface.constructor)}, {"methods", methods}, {"events", events}};
}

mcl::InterfaceDescriptor interface_from_json(const Json& j) {
    mcl::InterfaceDescriptor d;
    d.contract = j.at("contract").get<std::string>();
    d.constructor = method_from_json(j.at("constructor"));
    for (const auto& m : j.at("methods")) d.methods.push_back(method_from_json(m));
    for (const auto& e : j.at("events")) d.events.push_back({e.at("name").get<std::string>(), params_from_json(e.at("params"))});
    return d;
}

Json block_to_json(const Block& b) {
    Json hashes = Json::array();
    for (const auto& h : b.tx_hashes) hashes.push_back(h.hex());
    return {{"number", b.number}, {"timestamp", b.timestamp}, {"hash", b.hash.hex()}, {"parent_hash", b.parent_hash.hex()}, {"tx_hashes", hashes}};
}

Block block_from_json(const Json& j) {
    Block b;
    b.number = j.at("number").get<std::uint64_t>();
    b.timestamp = j.at("timestamp").get<std::uint64_t>();
    b.hash = Hash32::from_hex(j.at("hash").get<std::string>());
    b.parent_hash = Hash32::from_hex(j.at("parent_hash").get<std::string>());
    for (const auto& h : j.at("tx_hashes")) b.tx_hashes.push_back(Hash32::from_hex(h.get<std::string>()));
    return b;
}

std::string export_snapshot(const WorldState& state) {
    std::string out;
    out += dump_line({{"kind", "meta"},
                      {"format", "replaylab-chain"},
                      {"version", 1},
                      {"gas_price", word_to_dec(state.config().gas_price)},
                      {"blocks", state.blocks().size()}});
    for (const auto& [addr, acc] : state.accounts()) {
        out += dump_line({{"kind", "account"}, {"address", addr.hex()}, {"type", acc.is_contract() ? "contract" : "external"}});
    }
    for (const auto& b : state.blocks()) {
        Json jb = block_to_json(b);
        jb["kind"] = "block";
        out += dump_line(jb);
        for (const auto& h : b.tx_hashes) {
            const auto* tx = state.transaction(h);
            const auto* r = state.receipt(h);
            Json jt = tx_record_to_json({*tx, *r, b.timestamp});
            jt["kind"] = "tx";
            out += dump_line(jt);
            for (const auto& it : r->internal_txs) {
                Json ji = internal_tx_to_json(it);
                ji["kind"] = "internal_tx";
                out += dump_line(ji);
            }
            for (const auto& e : r->events) {
                Json je = event_to_json(e);
                je["kind"] = "log";
                out += dump_line(je);
            }
        }
        for (const auto& [addr, bal] : state.balance_deltas().at(b.number)) {
            out += dump_line({{"kind", "balance"}, {"block", b.number}, {"address", addr.hex()}, {"balance", word_to_dec(bal)}});
        }
    }
    for (const auto& [addr, rec] : state.contracts()) {
        const auto* acc = state.account(addr);
        out += dump_line({{"kind", "contract"},
                          {"address", addr.hex()},
                          {"name", rec.name},
                          {"source", rec.source},
                          {"interface", interface_to_json(acc->code->iface)},
                          {"creation_tx_hash", rec.creation_tx.hex()},
                          {"created_internal", rec.created_internal},
                          {"creator", rec.creator.hex()},
                          {"constructor_args", args_to_json(rec.constructor_args)},
                          {"value", word_to_dec(rec.value)}});
    }
    return out;
}

}  // namespace replaylab::chain
