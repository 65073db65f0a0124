// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/scriptgen/plan.hpp>

#include <cstdio>
#include <set>

namespace replaylab::scriptgen {

using chain::Value;
using mcl::Type;

namespace {

    constexpr unsigned kMaxEmbedShift = 96;
    constexpr std::uint64_t kDefaultGasLimit = 3'000'000;
    constexpr std::uint64_t kGetterUintRange = 65536;

    Address one_address() {
        Address a;
        a.bytes.back() = 1;
        return a;
    }

}  // namespace

Address replay_pool_address(std::size_t ref) {
    if (ref == kZeroRef) return {};
    if (ref == kOneRef) return one_address();
    if (ref == kContractRef) throw ScriptgenError("the contract entry resolves only at deployment");
    return derive_address("replay-eoa", ref);
}

Address illegal_sender(std::size_t tx_index) { return derive_address("illegal-sender", tx_index); }

AddressMap::AddressMap(const Address& contract) {
    add(Address{});
    add(one_address());
    if (add(contract) != kContractRef) throw ScriptgenError("contract address collides with a reserved entry");
}

std::optional<std::size_t> AddressMap::find(const Address& historic) const {
    auto it = index_.find(historic);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t AddressMap::add(const Address& historic) {
    if (auto r = find(historic)) return *r;
    entries_.push_back(historic);
    index_[historic] = entries_.size() - 1;
    return entries_.size() - 1;
}

std::size_t AddressMap::add_created(const Address& historic, std::uint64_t nonce) {
    if (find(historic)) throw ScriptgenError("created contract " + historic.hex() + " is already mapped");
    const auto ref = add(historic);
    created_[ref] = nonce;
    return ref;
}

std::optional<std::uint64_t> AddressMap::creation_nonce(std::size_t ref) const {
    auto it = created_.find(ref);
    if (it == created_.end()) return std::nullopt;
    return it->second;
}

Address AddressMap::replay(std::size_t ref, const Address& deployed) const {
    if (ref >= entries_.size()) throw ScriptgenError("address entry " + std::to_string(ref) + " out of range");
    if (ref == kContractRef) return deployed;
    if (auto n = creation_nonce(ref)) return chain::WorldState::create_address(deployed, *n);
    return replay_pool_address(ref);
}

std::optional<std::size_t> AddressMap::find_replay(const Address& replay, const Address& deployed) const {
    if (replay == deployed) return kContractRef;
    if (replay.is_zero()) return kZeroRef;
    if (replay == one_address()) return kOneRef;
    for (std::size_t ref = kReservedEntries; ref < entries_.size(); ++ref) {
        if (this->replay(ref, deployed) == replay) return ref;
    }
    return std::nullopt;
}

namespace {

    void collect(const Value& v, std::vector<Address>& out) {
        if (v.type == Type::kAddress) out.push_back(Address::from_word(v.word));
    }

    std::vector<Address> literal_addresses(const explorer::HistoricBundle& b) {
        std::vector<Address> out;
        try {
            const auto unit = mcl::parse(b.source);
            for (const auto& l : mcl::static_flags(unit, b.contract_name).literal_addresses) out.push_back(l.address);
        } catch (const std::exception&) {
            // Unparseable sources have no harvestable literals; deployment reports the problem.
        }
        return out;
    }

    // Contracts created directly by the contract under test in successful bundle transactions,
    // paired with the creator nonce that produced them.
    std::vector<std::pair<Address, std::uint64_t>> created_contracts(const explorer::HistoricBundle& b) {
        std::vector<Address> seen;
        for (const auto& rec : b.transactions) {
            if (rec.receipt.status != chain::Status::kSuccess) continue;
            auto it = b.internal_trace.find(rec.tx.hash);
            if (it == b.internal_trace.end()) continue;
            for (const auto& t : it->second) {
                if (t.is_create() && t.from == b.contract_address && t.created) seen.push_back(*t.created);
            }
        }
        std::vector<std::pair<Address, std::uint64_t>> out;
        const std::uint64_t bound = seen.size() + 64;  // constructor-time creations shift the nonce
        for (const auto& a : seen) {
            for (std::uint64_t n = 0; n < bound; ++n) {
                if (chain::WorldState::create_address(b.contract_address, n) == a) {
                    out.emplace_back(a, n);
                    break;
                }
            }
        }
        return out;
    }

}  // namespace

AddressMapResult build_address_map(const explorer::HistoricBundle& bundle, const std::vector<Address>& discovered,
                                   std::size_t cap) {
    if (cap < kReservedEntries) throw ScriptgenError("address cap below the reserved prefix");
    AddressMapResult r{AddressMap{bundle.contract_address}, false, 0};
    std::vector<Address> fixed{bundle.creation.from};
    for (const auto& a : bundle.creation.args) collect(a, fixed);
    for (const auto& a : literal_addresses(bundle)) fixed.push_back(a);
    for (const auto& a : discovered) fixed.push_back(a);
    for (const auto& a : fixed) r.map.add(a);
    for (const auto& [a, n] : created_contracts(bundle)) {
        if (!r.map.find(a)) r.map.add_created(a, n);
    }
    if (r.map.size() > cap) throw ScriptgenError("address cap too small for the deployment addresses");

    for (const auto& rec : bundle.transactions) {
        std::vector<Address> needed{rec.tx.from};
        if (rec.tx.to) needed.push_back(*rec.tx.to);
        for (const auto& a : rec.tx.args) collect(a, needed);
        std::set<Address> fresh;
        for (const auto& a : needed) {
            if (!r.map.find(a)) fresh.insert(a);
        }
        if (r.map.size() + fresh.size() > cap) {
            r.truncated = true;
            break;
        }
        for (const auto& a : needed) r.map.add(a);
        ++r.kept_transactions;
    }
    return r;
}

PlanWord translate_word(const AddressMap& map, Type type, const Word& w) {
    PlanWord out;
    if (type == Type::kAddress) {
        if (auto r = map.find(Address::from_word(w))) {
            out.ref = *r;
            return out;
        }
        out.residual = w;
        return out;
    }
    out.residual = w;
    if (type == Type::kBool) return out;
    const Word mask = word_mask(160);
    for (unsigned shift = 0; shift <= kMaxEmbedShift; ++shift) {
        const Word cand = (w >> shift) & mask;
        if (cand == 0) continue;
        auto r = map.find(Address::from_word(cand));
        if (!r || *r < kReservedEntries) continue;
        out.embeds.push_back({*r, shift});
        out.residual = w ^ (cand << shift);
        break;
    }
    return out;
}

Word resolve_word(const AddressMap& map, const PlanWord& w, const Address& deployed) {
    if (w.ref) return map.replay(*w.ref, deployed).to_word();
    Word out = w.residual;
    for (const auto& e : w.embeds) out |= map.replay(e.ref, deployed).to_word() << e.shift;
    return out;
}

Word historic_word(const AddressMap& map, const PlanWord& w) {
    if (w.ref) return map.historic(*w.ref).to_word();
    Word out = w.residual;
    for (const auto& e : w.embeds) out |= map.historic(e.ref).to_word() << e.shift;
    return out;
}

namespace {

    PlanArg translate_arg(const AddressMap& map, const Value& v) {
        PlanArg a;
        a.type = v.type;
        if (v.type == Type::kUintArray) {
            for (const auto& w : v.items) a.items.push_back(translate_word(map, Type::kUint, w));
        } else {
            a.word = translate_word(map, v.type, v.word);
        }
        return a;
    }

    std::vector<PlanArg> translate_args(const AddressMap& map, const std::vector<Value>& vs) {
        std::vector<PlanArg> out;
        for (const auto& v : vs) out.push_back(translate_arg(map, v));
        return out;
    }

    std::size_t require_ref(const AddressMap& map, const Address& a, const char* what) {
        auto r = map.find(a);
        if (!r) throw ScriptgenError(std::string(what) + " " + a.hex() + " is not in the address map");
        return *r;
    }

}  // namespace

Value resolve_arg(const AddressMap& map, const PlanArg& a, const Address& deployed) {
    Value v;
    v.type = a.type;
    if (a.type == Type::kUintArray) {
        for (const auto& w : a.items) v.items.push_back(resolve_word(map, w, deployed));
    } else {
        v.word = resolve_word(map, a.word, deployed);
    }
    return v;
}

PlanArg getter_argument(std::uint64_t seed, const std::string& method, std::size_t index, Type type,
                        std::size_t map_size) {
    const Word r = DigestBuilder{}.add("getter-arg").add(seed).add(method).add(static_cast<std::uint64_t>(index)).finish().to_word();
    PlanArg a;
    a.type = type;
    switch (type) {
        case Type::kBool:
            a.word.residual = r & 1;
            break;
        case Type::kAddress:
            a.word.ref = static_cast<std::size_t>(r % map_size);
            break;
        case Type::kUintArray:
            a.items.push_back(PlanWord{std::nullopt, r % kGetterUintRange, {}});
            break;
        case Type::kHash:
            a.word.residual = r;
            break;
        default:
            a.word.residual = r % kGetterUintRange;
    }
    return a;
}

TestPlan generate_plan(const explorer::HistoricBundle& bundle, const AddressMapResult& m, const GenerateOptions& options) {
    if (bundle.partial && !options.allow_partial) throw ScriptgenError("bundle is partial; refusing to generate a plan");
    const AddressMap& map = m.map;
    TestPlan plan;
    plan.contract_name = bundle.contract_name;
    plan.historic_contract = bundle.contract_address;
    plan.source = bundle.source;
    plan.seed = options.seed;
    plan.truncated = m.truncated;
    plan.requested_T = bundle.requested_T;
    plan.address_map = map;

    plan.deploy.from = require_ref(map, bundle.creation.from, "creator");
    plan.deploy.args = translate_args(map, bundle.creation.args);
    plan.deploy.value = bundle.creation.value;
    plan.deploy.timestamp = bundle.creation.timestamp;
    plan.deploy.gas_limit = bundle.creation.gas_limit != 0 ? bundle.creation.gas_limit : kDefaultGasLimit;

    const std::size_t kept = std::min(m.kept_transactions, bundle.transactions.size());
    for (std::size_t i = 0; i < kept; ++i) {
        const auto& rec = bundle.transactions[i];
        TxStep s;
        s.index = i;
        s.historic_hash = rec.tx.hash;
        s.method = rec.tx.method;
        s.args = translate_args(map, rec.tx.args);
        s.from = require_ref(map, rec.tx.from, "sender");
        s.to = rec.tx.to ? require_ref(map, *rec.tx.to, "recipient") : kContractRef;
        s.value = rec.tx.value;
        s.gas_limit = rec.tx.gas_limit;
        s.timestamp = rec.timestamp;
        s.expected_status = rec.receipt.status;
        s.force_fail = rec.receipt.status != chain::Status::kSuccess;
        s.illegal_from = illegal_sender(i);
        for (const auto& e : rec.receipt.events) {
            if (e.emitter != bundle.contract_address) continue;
            ExpectedEvent x{e.name, {}};
            for (const auto& p : e.params) x.params.push_back({p.name, p.type, translate_word(map, p.type, p.value)});
            s.expected_events.push_back(std::move(x));
        }
        s.balance_queries.push_back(s.from);
        if (s.to != s.from) s.balance_queries.push_back(s.to);
        plan.txs.push_back(std::move(s));
    }

    for (const auto& m2 : bundle.iface.pure_methods()) {
        GetterProbe g{m2.name, {}};
        for (std::size_t i = 0; i < m2.params.size(); ++i) {
            g.args.push_back(getter_argument(options.seed, m2.name, i, m2.params[i].type, map.size()));
        }
        plan.getters.push_back(std::move(g));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Plan file

namespace {

    Json word_to_json(Type type, const PlanWord& w) {
        if (w.ref) return {{"ref", *w.ref}};
        if (w.embeds.empty()) {
            if (type == Type::kBool) return {{"literal", w.residual != 0}};
            if (type == Type::kAddress) return {{"literal", Address::from_word(w.residual).hex()}};
            return {{"literal", word_to_dec(w.residual)}};
        }
        Json embeds = Json::array();
        for (const auto& e : w.embeds) embeds.push_back({{"ref", e.ref}, {"shift", e.shift}});
        return {{"word", word_to_dec(w.residual)}, {"embed", embeds}};
    }

    PlanWord word_from_json(Type type, const Json& j) {
        PlanWord w;
        if (j.contains("ref")) {
            w.ref = j.at("ref").get<std::size_t>();
        } else if (j.contains("embed")) {
            w.residual = word_from_string(j.at("word").get<std::string>());
            for (const auto& e : j.at("embed")) w.embeds.push_back({e.at("ref").get<std::size_t>(), e.at("shift").get<unsigned>()});
        } else if (type == Type::kBool) {
            w.residual = j.at("literal").get<bool>() ? 1 : 0;
        } else if (type == Type::kAddress) {
            w.residual = Address::from_hex(j.at("literal").get<std::string>()).to_word();
        } else {
            w.residual = word_from_string(j.at("literal").get<std::string>());
        }
        return w;
    }

    Type type_of(const Json& j) {
        const auto t = mcl::type_from_name(j.get<std::string>());
        if (!t) throw ScriptgenError("unknown type " + j.dump());
        return *t;
    }

    Json arg_to_json(const PlanArg& a) {
        Json j{{"type", mcl::type_name(a.type)}};
        if (a.type == Type::kUintArray) {
            Json items = Json::array();
            for (const auto& w : a.items) items.push_back(word_to_json(Type::kUint, w));
            j["items"] = items;
        } else {
            j.update(word_to_json(a.type, a.word));
        }
        return j;
    }

    PlanArg arg_from_json(const Json& j) {
        PlanArg a;
        a.type = type_of(j.at("type"));
        if (a.type == Type::kUintArray) {
            for (const auto& w : j.at("items")) a.items.push_back(word_from_json(Type::kUint, w));
        } else {
            a.word = word_from_json(a.type, j);
        }
        return a;
    }

    Json args_to_json(const std::vector<PlanArg>& args) {
        Json out = Json::array();
        for (const auto& a : args) out.push_back(arg_to_json(a));
        return out;
    }

    std::vector<PlanArg> args_from_json(const Json& j) {
        std::vector<PlanArg> out;
        for (const auto& a : j) out.push_back(arg_from_json(a));
        return out;
    }

    std::string source_digest(const std::string& source) { return DigestBuilder{}.add("source").add(source).finish().hex(); }

}  // namespace

Json plan_to_json(const TestPlan& plan) {
    Json map = Json::array();
    for (const auto& a : plan.address_map.entries()) map.push_back(a.hex());
    Json created = Json::array();
    for (const auto& [ref, nonce] : plan.address_map.created()) created.push_back({{"ref", ref}, {"nonce", nonce}});
    Json steps = Json::array();
    steps.push_back({{"kind", "deploy"},
                     {"from", {{"ref", plan.deploy.from}}},
                     {"args", args_to_json(plan.deploy.args)},
                     {"value", word_to_dec(plan.deploy.value)},
                     {"timestamp", plan.deploy.timestamp},
                     {"gas_limit", plan.deploy.gas_limit}});
    for (const auto& s : plan.txs) {
        Json events = Json::array();
        for (const auto& e : s.expected_events) {
            Json params = Json::array();
            for (const auto& p : e.params) {
                Json jp = word_to_json(p.type, p.value);
                jp["name"] = p.name;
                jp["type"] = mcl::type_name(p.type);
                params.push_back(jp);
            }
            events.push_back({{"name", e.name}, {"params", params}});
        }
        Json queries = Json::array();
        for (auto q : s.balance_queries) queries.push_back({{"ref", q}});
        Json j{{"kind", "tx"},
               {"index", s.index},
               {"historic_hash", s.historic_hash.hex()},
               {"method", s.method},
               {"args", args_to_json(s.args)},
               {"to", {{"ref", s.to}}},
               {"value", word_to_dec(s.value)},
               {"gas_limit", s.gas_limit},
               {"timestamp", s.timestamp},
               {"force_fail", s.force_fail},
               {"expected_status", chain::status_name(s.expected_status)},
               {"expected_events", events},
               {"balance_queries", queries}};
        if (s.force_fail) {
            j["from"] = {{"illegal", s.illegal_from.hex()}};
            j["historic_from"] = {{"ref", s.from}};
        } else {
            j["from"] = {{"ref", s.from}};
        }
        steps.push_back(j);
    }
    for (const auto& g : plan.getters) steps.push_back({{"kind", "getter"}, {"method", g.method}, {"args", args_to_json(g.args)}});
    return {{"format", "replaylab-plan"},
            {"version", 1},
            {"contract", plan.contract_name},
            {"historic_contract", plan.historic_contract.hex()},
            {"source", plan.source_path()},
            {"source_digest", source_digest(plan.source)},
            {"seed", plan.seed},
            {"truncated", plan.truncated},
            {"requested_T", plan.requested_T},
            {"address_map", map},
            {"created", created},
            {"steps", steps}};
}

TestPlan plan_from_json(const Json& j, std::string source) {
    if (j.value("format", "") != "replaylab-plan") throw ScriptgenError("not a plan document");
    if (j.at("source_digest").get<std::string>() != source_digest(source)) {
        throw ScriptgenError("plan/source mismatch for " + j.at("source").get<std::string>());
    }
    TestPlan plan;
    plan.contract_name = j.at("contract").get<std::string>();
    plan.historic_contract = Address::from_hex(j.at("historic_contract").get<std::string>());
    plan.source = std::move(source);
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.truncated = j.at("truncated").get<bool>();
    plan.requested_T = j.at("requested_T").get<std::size_t>();
    const auto& entries = j.at("address_map");
    if (entries.size() < kReservedEntries) throw ScriptgenError("address map lacks the reserved prefix");
    plan.address_map = AddressMap{Address::from_hex(entries.at(kContractRef).get<std::string>())};
    std::map<std::size_t, std::uint64_t> created;
    for (const auto& c : j.value("created", Json::array())) created[c.at("ref").get<std::size_t>()] = c.at("nonce").get<std::uint64_t>();
    for (std::size_t i = kReservedEntries; i < entries.size(); ++i) {
        const auto a = Address::from_hex(entries[i].get<std::string>());
        auto c = created.find(i);
        if (plan.address_map.find(a) || (c == created.end() ? plan.address_map.add(a) : plan.address_map.add_created(a, c->second)) != i) {
            throw ScriptgenError("duplicate address map entry " + std::to_string(i));
        }
    }
    for (const auto& s : j.at("steps")) {
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "deploy") {
            plan.deploy.from = s.at("from").at("ref").get<std::size_t>();
            plan.deploy.args = args_from_json(s.at("args"));
            plan.deploy.value = word_from_string(s.at("value").get<std::string>());
            plan.deploy.timestamp = s.at("timestamp").get<std::uint64_t>();
            plan.deploy.gas_limit = s.at("gas_limit").get<std::uint64_t>();
        } else if (kind == "tx") {
            TxStep t;
            t.index = s.at("index").get<std::size_t>();
            t.historic_hash = Hash32::from_hex(s.at("historic_hash").get<std::string>());
            t.method = s.at("method").get<std::string>();
            t.args = args_from_json(s.at("args"));
            t.to = s.at("to").at("ref").get<std::size_t>();
            t.value = word_from_string(s.at("value").get<std::string>());
            t.gas_limit = s.at("gas_limit").get<std::uint64_t>();
            t.timestamp = s.at("timestamp").get<std::uint64_t>();
            t.force_fail = s.at("force_fail").get<bool>();
            t.expected_status = chain::status_from_name(s.at("expected_status").get<std::string>());
            if (t.force_fail) {
                t.illegal_from = Address::from_hex(s.at("from").at("illegal").get<std::string>());
                t.from = s.at("historic_from").at("ref").get<std::size_t>();
            } else {
                t.from = s.at("from").at("ref").get<std::size_t>();
                t.illegal_from = illegal_sender(t.index);
            }
            for (const auto& e : s.at("expected_events")) {
                ExpectedEvent x{e.at("name").get<std::string>(), {}};
                for (const auto& p : e.at("params")) {
                    const Type ty = type_of(p.at("type"));
                    x.params.push_back({p.at("name").get<std::string>(), ty, word_from_json(ty, p)});
                }
                t.expected_events.push_back(std::move(x));
            }
            for (const auto& q : s.at("balance_queries")) t.balance_queries.push_back(q.at("ref").get<std::size_t>());
            plan.txs.push_back(std::move(t));
        } else if (kind == "getter") {
            plan.getters.push_back({s.at("method").get<std::string>(), args_from_json(s.at("args"))});
        } else {
            throw ScriptgenError("unknown step kind '" + kind + "'");
        }
    }
    return plan;
}

std::string render_plan(const TestPlan& plan) { return plan_to_json(plan).dump(1) + "\n"; }

Json genesis_config(const TestPlan& plan, const Word& endowment, const Word& gas_price) {
    Json accounts = Json::array();
    for (std::size_t ref = kReservedEntries; ref < plan.address_map.size(); ++ref) {
        if (plan.address_map.creation_nonce(ref)) continue;
        accounts.push_back({{"ref", ref}, {"address", replay_pool_address(ref).hex()}, {"balance", word_to_dec(endowment)}});
    }
    return {{"gas_price", word_to_dec(gas_price)}, {"accounts", accounts}};
}

// ---------------------------------------------------------------------------
// Test box

namespace {

    void octal(char* field, std::size_t width, std::uint64_t v) {
        std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1), static_cast<unsigned long long>(v));
    }

    void tar_entry(std::string& out, const std::string& name, const std::string& data) {
        if (name.size() >= 100) throw ScriptgenError("archive path too long: " + name);
        char h[512] = {};
        std::copy(name.begin(), name.end(), h);
        octal(h + 100, 8, 0644);
        octal(h + 108, 8, 0);
        octal(h + 116, 8, 0);
        octal(h + 124, 12, data.size());
        octal(h + 136, 12, 0);  // fixed mtime keeps archives reproducible
        std::fill(h + 148, h + 156, ' ');
        h[156] = '0';
        std::copy_n("ustar", 6, h + 257);
        h[263] = '0';
        h[264] = '0';
        unsigned sum = 0;
        for (unsigned char c : h) sum += c;
        std::snprintf(h + 148, 8, "%06o", sum);
        h[155] = ' ';
        out.append(h, sizeof h);
        out += data;
        out.append((512 - data.size() % 512) % 512, '\0');
    }

}  // namespace

std::string test_box(const TestPlan& plan, const Json& genesis) {
    std::string out;
    tar_entry(out, plan.source_path(), plan.source);
    tar_entry(out, "test/plan.json", render_plan(plan));
    tar_entry(out, "config/genesis.json", genesis.dump(1) + "\n");
    out.append(1024, '\0');
    return out;
}

}  // namespace replaylab::scriptgen
