// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/chain/world_state.hpp>

#include <functional>
#include <limits>

#include <replaylab/chain/gas.hpp>

namespace replaylab::chain {

using mcl::Op;
using mcl::Type;

std::string Value::to_string() const {
    switch (type) {
        case Type::kBool:
            return word == 0 ? "false" : "true";
        case Type::kAddress:
            return Address::from_word(word).hex();
        case Type::kHash:
            return Hash32::from_word(word).hex();
        case Type::kUintArray: {
            std::string out = "[";
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out += ",";
                out += word_to_dec(items[i]);
            }
            return out + "]";
        }
        default:
            return word_to_dec(word);
    }
}

std::string status_name(Status s) {
    switch (s) {
        case Status::kSuccess:
            return "success";
        case Status::kFailed:
            return "failed";
        case Status::kOutOfGas:
            return "out_of_gas";
    }
    return "?";
}

Status status_from_name(const std::string& s) {
    if (s == "success") return Status::kSuccess;
    if (s == "failed") return Status::kFailed;
    if (s == "out_of_gas") return Status::kOutOfGas;
    throw ChainError("unknown status '" + s + "'");
}

const EventParam* EventRecord::param(const std::string& n) const {
    for (const auto& p : params) {
        if (p.name == n) return &p;
    }
    return nullptr;
}

std::set<std::uint32_t> VmTrace::executed_indices(const Address& code_address) const {
    std::set<std::uint32_t> out;
    auto it = executed.find(code_address);
    if (it == executed.end()) return out;
    for (const auto& [idx, count] : it->second) {
        if (count) out.insert(idx);
    }
    return out;
}

namespace gas {

    std::uint64_t create_cost(const mcl::CompiledContract& code) {
        return kCreateBase + kCreatePerInstruction * static_cast<std::uint64_t>(code.instruction_count);
    }

    std::uint64_t instruction_cost(const mcl::Instruction& ins, const mcl::CompiledContract& contract) {
        switch (ins.op) {
            case Op::kPush:
            case Op::kJump:
            case Op::kJumpIfNot:
            case Op::kRequire:
            case Op::kAssert:
            case Op::kReturn:
            case Op::kPop:
                return 0;
            case Op::kSload:
            case Op::kMapLoad:
            case Op::kArrLoad:
            case Op::kArrLen:
            case Op::kBalance:
            case Op::kBlockHash:
                return kStorageRead;
            case Op::kSstore:
            case Op::kMapStore:
            case Op::kArrStore:
            case Op::kArrPush:
                return kStorageWrite;
            case Op::kEmit:
                return kEmitBase + kEmitPerParam * ins.b;
            case Op::kCall:
                return kCall;
            case Op::kTransfer:
                return kTransfer;
            case Op::kCreate:
                return create_cost(*contract.creatable.at(ins.a));
            default:
                return kMove;
        }
    }

    std::uint64_t intrinsic_cost(const Transaction& tx) {
        std::uint64_t c = kIntrinsic;
        if (tx.is_create() && tx.code) c += create_cost(*tx.code);
        return c;
    }

}  // namespace gas

namespace {

    struct VmFailure {
        Status status;
        std::string reason;
    };

    const char* const kReverted = "Reverted";
    const char* const kBadInstruction = "Bad instruction";
    const char* const kBadJump = "Bad jump destination";

    [[noreturn]] void fail(const char* reason) { throw VmFailure{Status::kFailed, reason}; }

    void init_storage(Account& a) {
        a.scalars.assign(a.code->scalar_slots, Word{0});
        a.maps.assign(a.code->map_slots, {});
        a.arrays.assign(a.code->array_slots, {});
    }

    bool value_matches(const Value& v, Type t) {
        if (v.type != t) return false;
        switch (t) {
            case Type::kBool:
                return v.word <= 1;
            case Type::kAddress:
                return v.word <= word_mask(160);
            default:
                return true;
        }
    }

    class Executor {
      public:
        struct Context {
            std::uint64_t number{0};
            std::uint64_t timestamp{0};
            std::function<Hash32(std::uint64_t)> blockhash;
            std::optional<std::uint64_t> gas_limit;  // nullopt: unmetered
            Hash32 tx_hash;
        };

        Executor(std::map<Address, Account>& accounts, const std::map<Address, ContractRecord>& known, Context ctx,
                 VmTrace& trace)
            : accounts_{accounts}, known_{known}, ctx_{std::move(ctx)}, trace_{trace} {}

        void charge(std::uint64_t c) {
            if (!ctx_.gas_limit) return;
            if (gas_used_ + c >= *ctx_.gas_limit) {
                gas_used_ = *ctx_.gas_limit;
                throw VmFailure{Status::kOutOfGas, "Out of gas"};
            }
            gas_used_ += c;
        }

        Account& ensure_account(const Address& a) {
            auto it = accounts_.find(a);
            if (it != accounts_.end()) return it->second;
            Account acc;
            acc.address = a;
            return accounts_.emplace(a, std::move(acc)).first->second;
        }

        void move_value(const Address& from, const Address& to, const Word& amount) {
            if (amount == 0) return;
            auto& src = ensure_account(from);
            const auto left = checked_sub(src.balance, amount);
            if (!left) fail(kReverted);
            src.balance = *left;
            auto& dst = ensure_account(to);
            const auto sum = checked_add(dst.balance, amount);
            if (!sum) fail(kBadInstruction);
            dst.balance = *sum;
        }

        std::vector<Word> call(const Address& sender, const Address& callee, const std::string& method,
                               const std::vector<Value>& args, const Word& value, std::size_t depth) {
            if (depth > WorldState::kMaxCallDepth) fail(kReverted);
            auto it = accounts_.find(callee);
            if (it == accounts_.end() || !it->second.is_contract()) {
                if (method.empty()) {
                    move_value(sender, callee, value);
                    return {};
                }
                fail(kReverted);
            }
            const auto code = it->second.code;
            const auto* m = code->find_method(method);
            if (!m || m->is_abstract || m->params.size() != args.size()) fail(kReverted);
            if (value != 0 && !m->payable) fail(kReverted);
            move_value(sender, callee, value);
            return run_method(code, *m, callee, sender, value, args, depth);
        }

        Address create(const Address& creator, std::shared_ptr<const mcl::CompiledContract> code,
                       const std::vector<Value>& args, const Word& value, std::size_t depth, bool internal) {
            if (depth > WorldState::kMaxCallDepth) fail(kReverted);
            auto& owner = ensure_account(creator);
            const Address addr = WorldState::create_address(creator, owner.nonce);
            ++owner.nonce;
            auto& acc = ensure_account(addr);
            if (acc.is_contract()) fail(kReverted);
            acc.code = code;
            acc.nonce = 1;
            init_storage(acc);
            const auto& ctor = code->iface.constructor;
            if (ctor.params.size() != args.size()) fail(kReverted);
            if (value != 0 && !ctor.payable) fail(kReverted);
            move_value(creator, addr, value);
            if (internal) {
                ContractRecord rec;
                rec.address = addr;
                rec.name = code->name;
                auto parent = known_.find(creator);
                if (parent != known_.end()) rec.source = parent->second.source;
                for (const auto& c : created_) {
                    if (c.address == creator) rec.source = c.source;
                }
                rec.creation_tx = ctx_.tx_hash;
                rec.created_internal = true;
                rec.creator = creator;
                rec.constructor_args = args;
                rec.value = value;
                created_.push_back(std::move(rec));
            }
            run_method(code, ctor, addr, creator, value, args, depth);
            return addr;
        }

        [[nodiscard]] std::uint64_t gas_used() const { return gas_used_; }
        std::vector<EventRecord>& events() { return events_; }
        std::vector<Transaction>& internal() { return internal_; }
        std::vector<ContractRecord>& created() { return created_; }

      private:
        struct Frame {
            std::shared_ptr<const mcl::CompiledContract> code;
            Address self;
            Address sender;
            Word value;
            std::vector<Word> locals;
            std::map<std::uint32_t, std::vector<Word>> arrays;
            std::vector<Word> stack;
        };

        std::vector<Word> run_method(const std::shared_ptr<const mcl::CompiledContract>& code, const mcl::MethodInfo& m,
                                     const Address& self, const Address& sender, const Word& value,
                                     const std::vector<Value>& args, std::size_t depth) {
            Frame f;
            f.code = code;
            f.self = self;
            f.sender = sender;
            f.value = value;
            f.locals.assign(std::max<std::size_t>(m.frame_size, args.size()), Word{0});
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (!value_matches(args[i], m.params[i].type)) fail(kReverted);
                if (args[i].type == Type::kUintArray) {
                    f.arrays[static_cast<std::uint32_t>(i)] = args[i].items;
                } else {
                    f.locals[i] = args[i].word;
                }
            }
            return run(f, m.entry, depth);
        }

        static Word pop(Frame& f) {
            if (f.stack.empty()) throw std::logic_error("VM stack underflow");
            Word w = std::move(f.stack.back());
            f.stack.pop_back();
            return w;
        }

        static std::vector<Word> pop_n(Frame& f, std::size_t n) {
            if (f.stack.size() < n) throw std::logic_error("VM stack underflow");
            std::vector<Word> out(f.stack.end() - static_cast<std::ptrdiff_t>(n), f.stack.end());
            f.stack.resize(f.stack.size() - n);
            return out;
        }

        std::vector<Word> run(Frame& f, std::uint32_t pc, std::size_t depth) {
            const auto& c = *f.code;
            auto& counts = trace_.executed[f.self];
            for (;;) {
                if (pc >= c.code.size()) fail(kBadJump);
                const auto& ins = c.code[pc];
                charge(gas::instruction_cost(ins, c));
                ++counts[pc];
                std::uint32_t next = pc + 1;
                switch (ins.op) {
                    case Op::kEnter:
                        if (f.locals.size() < ins.a) f.locals.resize(ins.a);
                        break;
                    case Op::kPush:
                        f.stack.push_back(c.constants.at(ins.a));
                        break;
                    case Op::kLoadLocal:
                        f.stack.push_back(f.locals.at(ins.a));
                        break;
                    case Op::kStoreLocal:
                        f.locals.at(ins.a) = pop(f);
                        break;
                    case Op::kSload:
                        f.stack.push_back(self(f).scalars.at(ins.a));
                        break;
                    case Op::kSstore:
                        self(f).scalars.at(ins.a) = pop(f);
                        break;
                    case Op::kMapLoad: {
                        const auto key = Address::from_word(pop(f));
                        const auto& m = self(f).maps.at(ins.a);
                        auto it = m.find(key);
                        f.stack.push_back(it == m.end() ? Word{0} : it->second);
                        break;
                    }
                    case Op::kMapStore: {
                        Word v = pop(f);
                        const auto key = Address::from_word(pop(f));
                        auto& m = self(f).maps.at(ins.a);
                        if (v == 0) {
                            m.erase(key);
                        } else {
                            m[key] = std::move(v);
                        }
                        break;
                    }
                    case Op::kArrLoad: {
                        const Word idx = pop(f);
                        const auto& arr = self(f).arrays.at(ins.a);
                        if (idx >= arr.size()) fail(kBadJump);
                        f.stack.push_back(arr[static_cast<std::size_t>(idx)]);
                        break;
                    }
                    case Op::kArrStore: {
                        Word v = pop(f);
                        const Word idx = pop(f);
                        auto& arr = self(f).arrays.at(ins.a);
                        if (idx >= arr.size()) fail(kBadJump);
                        arr[static_cast<std::size_t>(idx)] = std::move(v);
                        break;
                    }
                    case Op::kArrPush:
                        self(f).arrays.at(ins.a).push_back(pop(f));
                        break;
                    case Op::kArrLen:
                        f.stack.push_back(self(f).arrays.at(ins.a).size());
                        break;
                    case Op::kCdLoad: {
                        const Word idx = pop(f);
                        const auto& arr = f.arrays[ins.a];
                        if (idx >= arr.size()) fail(kBadJump);
                        f.stack.push_back(arr[static_cast<std::size_t>(idx)]);
                        break;
                    }
                    case Op::kCdLen:
                        f.stack.push_back(f.arrays[ins.a].size());
                        break;
                    case Op::kAdd:
                    case Op::kSub:
                    case Op::kMul: {
                        const Word b = pop(f);
                        const Word a = pop(f);
                        const auto r = ins.op == Op::kAdd   ? checked_add(a, b)
                                       : ins.op == Op::kSub ? checked_sub(a, b)
                                                            : checked_mul(a, b);
                        if (!r) fail(kBadInstruction);
                        f.stack.push_back(*r);
                        break;
                    }
                    case Op::kDiv:
                    case Op::kMod: {
                        const Word b = pop(f);
                        const Word a = pop(f);
                        if (b == 0) fail(kBadInstruction);
                        f.stack.push_back(ins.op == Op::kDiv ? Word(a / b) : Word(a % b));
                        break;
                    }
                    case Op::kShl:
                    case Op::kShr: {
                        const Word b = pop(f);
                        const Word a = pop(f);
                        f.stack.push_back(ins.op == Op::kShl ? shift_left(a, b) : shift_right(a, b));
                        break;
                    }
                    case Op::kBitAnd:
                    case Op::kBitOr: {
                        const Word b = pop(f);
                        const Word a = pop(f);
                        f.stack.push_back(ins.op == Op::kBitAnd ? Word(a & b) : Word(a | b));
                        break;
                    }
                    case Op::kEq:
                    case Op::kNe:
                    case Op::kLt:
                    case Op::kLe:
                    case Op::kGt:
                    case Op::kGe: {
                        const Word b = pop(f);
                        const Word a = pop(f);
                        bool r = false;
                        switch (ins.op) {
                            case Op::kEq:
                                r = a == b;
                                break;
                            case Op::kNe:
                                r = a != b;
                                break;
                            case Op::kLt:
                                r = a < b;
                                break;
                            case Op::kLe:
                                r = a <= b;
                                break;
                            case Op::kGt:
                                r = a > b;
                                break;
                            default:
                                r = a >= b;
                        }
                        f.stack.push_back(r ? 1 : 0);
                        break;
                    }
                    case Op::kNot:
                        f.stack.push_back(pop(f) == 0 ? 1 : 0);
                        break;
                    case Op::kLogicAnd:
                    case Op::kLogicOr: {
                        const bool b = pop(f) != 0;
                        const bool a = pop(f) != 0;
                        f.stack.push_back((ins.op == Op::kLogicAnd ? (a && b) : (a || b)) ? 1 : 0);
                        break;
                    }
                    case Op::kEnv:
                        switch (static_cast<mcl::EnvVar>(ins.a)) {
                            case mcl::EnvVar::kNow:
                                f.stack.push_back(ctx_.timestamp);
                                break;
                            case mcl::EnvVar::kBlockNumber:
                                f.stack.push_back(ctx_.number);
                                break;
                            case mcl::EnvVar::kMsgSender:
                                f.stack.push_back(f.sender.to_word());
                                break;
                            case mcl::EnvVar::kMsgValue:
                                f.stack.push_back(f.value);
                                break;
                            case mcl::EnvVar::kThis:
                                f.stack.push_back(f.self.to_word());
                                break;
                        }
                        break;
                    case Op::kBlockHash: {
                        const Word n = pop(f);
                        const Hash32 h = n > Word{std::numeric_limits<std::uint64_t>::max()}
                                             ? Hash32{}
                                             : ctx_.blockhash(static_cast<std::uint64_t>(n));
                        f.stack.push_back(h.to_word());
                        break;
                    }
                    case Op::kBalance: {
                        const auto a = Address::from_word(pop(f));
                        auto it = accounts_.find(a);
                        f.stack.push_back(it == accounts_.end() ? Word{0} : it->second.balance);
                        break;
                    }
                    case Op::kCastAddress: {
                        const Word v = pop(f);
                        const auto a = Address::from_word(v);
                        trace_.address_casts.push_back({v, a});
                        f.stack.push_back(a.to_word());
                        break;
                    }
                    case Op::kCastContract:
                        break;
                    case Op::kJump:
                        next = ins.a;
                        break;
                    case Op::kJumpIfNot:
                        if (pop(f) == 0) next = ins.a;
                        break;
                    case Op::kBoundCheck: {
                        const Word to = pop(f);
                        const Word from = pop(f);
                        if (to > from && to - from > ins.a) fail(kBadInstruction);
                        break;
                    }
                    case Op::kRequire:
                        if (pop(f) == 0) {
                            if (ins.a == 0) fail(kReverted);
                            throw VmFailure{Status::kFailed, c.strings.at(ins.a - 1)};
                        }
                        break;
                    case Op::kAssert:
                        if (pop(f) == 0) fail(kBadInstruction);
                        break;
                    case Op::kEmit: {
                        const auto& ev = c.iface.events.at(ins.a);
                        const auto vals = pop_n(f, ins.b);
                        EventRecord rec;
                        rec.emitter = f.self;
                        rec.name = ev.name;
                        for (std::size_t i = 0; i < vals.size(); ++i) rec.params.push_back({ev.params[i].name, ev.params[i].type, vals[i]});
                        events_.push_back(std::move(rec));
                        break;
                    }
                    case Op::kTransfer: {
                        const Word amount = pop(f);
                        const auto to = Address::from_word(pop(f));
                        move_value(f.self, to, amount);
                        record_internal(f.self, to, "", {}, amount);
                        break;
                    }
                    case Op::kCall: {
                        const std::uint32_t nargs = ins.b & 0xffff;
                        const std::uint32_t nrets = ins.b >> 16;
                        const auto words = pop_n(f, nargs);
                        const auto target = Address::from_word(pop(f));
                        const auto& method = c.strings.at(ins.a);
                        auto it = accounts_.find(target);
                        if (it == accounts_.end() || !it->second.is_contract()) fail(kReverted);
                        const auto* m = it->second.code->find_method(method);
                        if (!m || m->params.size() != nargs || m->returns.size() != nrets) fail(kReverted);
                        std::vector<Value> args;
                        for (std::size_t i = 0; i < nargs; ++i) args.push_back({m->params[i].type, words[i], {}});
                        trace_.call_edges.push_back({f.self, target, method});
                        record_internal(f.self, target, method, args, 0);
                        const auto rets = call(f.self, target, method, args, 0, depth + 1);
                        for (const auto& r : rets) f.stack.push_back(r);
                        break;
                    }
                    case Op::kCreate: {
                        const auto& code = c.creatable.at(ins.a);
                        const auto words = pop_n(f, ins.b);
                        std::vector<Value> args;
                        for (std::size_t i = 0; i < words.size(); ++i) {
                            args.push_back({code->iface.constructor.params.at(i).type, words[i], {}});
                        }
                        const auto index = internal_.size();
                        record_internal(f.self, std::nullopt, "", args, 0);
                        internal_[index].contract_name = code->name;
                        const auto addr = create(f.self, code, args, 0, depth + 1, true);
                        internal_[index].created = addr;
                        f.stack.push_back(addr.to_word());
                        break;
                    }
                    case Op::kReturn:
                        return pop_n(f, ins.a);
                    case Op::kPop:
                        pop(f);
                        break;
                }
                pc = next;
            }
        }

        Account& self(const Frame& f) { return accounts_.at(f.self); }

        void record_internal(const Address& from, std::optional<Address> to, const std::string& method,
                             std::vector<Value> args, const Word& value) {
            Transaction t;
            t.from = from;
            t.to = to;
            t.method = method;
            t.args = std::move(args);
            t.value = value;
            t.origin = Origin::kInternal;
            internal_.push_back(std::move(t));
        }

        std::map<Address, Account>& accounts_;
        const std::map<Address, ContractRecord>& known_;
        Context ctx_;
        VmTrace& trace_;
        std::uint64_t gas_used_{0};
        std::vector<EventRecord> events_;
        std::vector<Transaction> internal_;
        std::vector<ContractRecord> created_;
    };

    Hash32 block_digest(const Block& b) {
        DigestBuilder d;
        d.add("block").add(b.number).add(b.timestamp).add(b.parent_hash).add(static_cast<std::uint64_t>(b.tx_hashes.size()));
        for (const auto& h : b.tx_hashes) d.add(h);
        return d.finish();
    }

}  // namespace

Address WorldState::create_address(const Address& creator, std::uint64_t nonce) {
    const Hash32 h = DigestBuilder{}.add("create").add(creator).add(nonce).finish();
    Address a;
    std::copy(h.bytes.begin() + 12, h.bytes.end(), a.bytes.begin());
    return a;
}

WorldState WorldState::genesis(const std::vector<std::pair<Address, Word>>& endowments, ChainConfig config) {
    WorldState s;
    s.config_ = std::move(config);
    std::map<Address, Word> delta;
    for (const auto& [addr, amount] : endowments) {
        Account a;
        a.address = addr;
        a.balance = amount;
        if (!s.accounts_.emplace(addr, std::move(a)).second) throw ChainError("duplicate genesis address " + addr.hex());
        delta[addr] = amount;
    }
    Block b;
    b.hash = block_digest(b);
    s.blocks_.push_back(b);
    s.last_balances_ = delta;
    s.balance_deltas_.push_back(std::move(delta));
    return s;
}

std::size_t WorldState::submit(Transaction tx) {
    if (!accounts_.contains(tx.from)) throw UnknownSender("unknown sender " + tx.from.hex());
    if (tx.is_create() && !tx.code) throw ChainError("creation transaction without code");
    tx.origin = Origin::kExternal;
    tx.parent_tx.reset();
    DigestBuilder d;
    d.add("tx").add(tx_nonce_++).add(tx.from);
    d.add(tx.to ? tx.to->hex() : std::string("create"));
    d.add(tx.value).add(tx.gas_limit).add(tx.method).add(static_cast<std::uint64_t>(tx.args.size()));
    for (const auto& a : tx.args) {
        d.add(static_cast<std::uint64_t>(a.type)).add(a.word).add(static_cast<std::uint64_t>(a.items.size()));
        for (const auto& w : a.items) d.add(w);
    }
    d.add(tx.contract_name);
    tx.hash = d.finish();
    pending_.push_back(std::move(tx));
    return pending_.size() - 1;
}

Hash32 WorldState::blockhash_at(std::uint64_t current, std::uint64_t n) const {
    if (n >= current) return {};
    if (current - n > kBlockhashWindow) return {};
    if (n >= blocks_.size()) return {};
    return blocks_[n].hash;
}

Hash32 WorldState::blockhash(std::uint64_t n) const { return blockhash_at(blocks_.size(), n); }

Receipt WorldState::execute(Transaction& tx, std::uint64_t number, std::uint64_t timestamp, VmTrace& trace) {
    Receipt r;
    r.tx_hash = tx.hash;
    r.block_number = number;
    auto sender = accounts_.find(tx.from);
    if (sender == accounts_.end()) {
        // The sender existed at submit time; accounts are never deleted, so this is unreachable.
        throw UnknownSender("unknown sender " + tx.from.hex());
    }
    const std::uint64_t intrinsic = gas::intrinsic_cost(tx);
    const Word max_fee = Word{tx.gas_limit} * config_.gas_price;

    auto settle_fee = [&](std::uint64_t used) {
        const Word fee = Word{used} * config_.gas_price;
        if (fee == 0) return;
        auto& s = accounts_.at(tx.from);
        s.balance -= fee;
        auto& cb = accounts_[config_.coinbase];
        cb.address = config_.coinbase;
        cb.balance += fee;
    };

    if (intrinsic >= tx.gas_limit) {
        r.status = Status::kOutOfGas;
        r.gas_used = tx.gas_limit;
        r.failure_reason = "Out of gas";
        if (sender->second.balance >= max_fee) settle_fee(r.gas_used);
        return r;
    }
    const auto needed = checked_add(tx.value, max_fee);
    if (!needed || sender->second.balance < *needed) {
        r.status = Status::kFailed;
        r.gas_used = intrinsic;
        r.failure_reason = "Insufficient balance";
        return r;
    }

    std::map<Address, Account> working = accounts_;
    Executor::Context ctx;
    ctx.number = number;
    ctx.timestamp = timestamp;
    ctx.blockhash = [this, number](std::uint64_t n) { return blockhash_at(number, n); };
    ctx.gas_limit = tx.gas_limit;
    ctx.tx_hash = tx.hash;
    Executor ex{working, contracts_, ctx, trace};
    try {
        ex.charge(intrinsic);
        if (tx.is_create()) {
            const Address addr = ex.create(tx.from, tx.code, tx.args, tx.value, 0, false);
            tx.created = addr;
            r.contract_address = addr;
        } else {
            ++working.at(tx.from).nonce;
            ex.call(tx.from, *tx.to, tx.method, tx.args, tx.value, 0);
        }
    } catch (const VmFailure& f) {
        r.status = f.status;
        r.failure_reason = f.reason;
        r.gas_used = f.status == Status::kOutOfGas ? tx.gas_limit : ex.gas_used();
        settle_fee(r.gas_used);
        return r;
    }
    r.status = Status::kSuccess;
    r.gas_used = ex.gas_used();
    accounts_ = std::move(working);
    settle_fee(r.gas_used);

    std::uint64_t log_index = 0;
    for (auto& e : ex.events()) {
        e.tx_hash = tx.hash;
        e.log_index = log_index++;
        e.block_number = number;
        r.events.push_back(std::move(e));
    }
    std::uint64_t index = 0;
    for (auto& it : ex.internal()) {
        it.parent_tx = tx.hash;
        it.hash = DigestBuilder{}.add("internal").add(tx.hash).add(index++).finish();
        r.internal_txs.push_back(std::move(it));
    }
    if (tx.is_create()) {
        ContractRecord rec;
        rec.address = *tx.created;
        rec.name = tx.code->name;
        rec.source = tx.source;
        rec.creation_tx = tx.hash;
        rec.creator = tx.from;
        rec.constructor_args = tx.args;
        rec.value = tx.value;
        contracts_[rec.address] = std::move(rec);
    }
    for (auto& rec : ex.created()) {
        if (rec.source.empty()) {
            if (auto it = contracts_.find(rec.creator); it != contracts_.end()) rec.source = it->second.source;
        }
        contracts_[rec.address] = std::move(rec);
    }
    return r;
}

std::pair<Block, std::vector<Receipt>> WorldState::mine_block(std::uint64_t timestamp) {
    const Block& parent = blocks_.back();
    if (timestamp < parent.timestamp) {
        throw ChainError("timestamp regression: " + std::to_string(timestamp) + " < " + std::to_string(parent.timestamp));
    }
    Block b;
    b.number = blocks_.size();
    b.timestamp = timestamp;
    b.parent_hash = parent.hash;
    std::vector<Receipt> receipts;
    auto queue = std::move(pending_);
    pending_.clear();
    for (auto& tx : queue) {
        VmTrace trace;
        Receipt r = execute(tx, b.number, timestamp, trace);
        b.tx_hashes.push_back(tx.hash);
        receipts_[tx.hash] = r;
        traces_[tx.hash] = std::move(trace);
        tx_index_[tx.hash] = executed_.size();
        executed_.push_back(std::move(tx));
        receipts.push_back(std::move(r));
    }
    b.hash = block_digest(b);
    blocks_.push_back(b);

    std::map<Address, Word> delta;
    for (const auto& [addr, acc] : accounts_) {
        auto it = last_balances_.find(addr);
        if (it == last_balances_.end() || it->second != acc.balance) {
            delta[addr] = acc.balance;
            last_balances_[addr] = acc.balance;
        }
    }
    balance_deltas_.push_back(std::move(delta));
    return {b, std::move(receipts)};
}

std::vector<Value> WorldState::call_pure(const Address& contract, const std::string& method,
                                         const std::vector<Value>& args) const {
    auto it = accounts_.find(contract);
    if (it == accounts_.end() || !it->second.is_contract()) throw ChainError("no contract at " + contract.hex());
    const auto* m = it->second.code->find_method(method);
    if (!m || m->is_abstract) throw ChainError("unknown method '" + method + "'");
    if (!m->pure) throw ChainError("method '" + method + "' is not pure");
    std::map<Address, Account> scratch = accounts_;
    VmTrace trace;
    Executor::Context ctx;
    ctx.number = blocks_.size();
    ctx.timestamp = blocks_.back().timestamp;
    ctx.blockhash = [this](std::uint64_t n) { return blockhash(n); };
    Executor ex{scratch, contracts_, ctx, trace};
    std::vector<Word> words;
    try {
        words = ex.call(Address{}, contract, method, args, 0, 0);
    } catch (const VmFailure& f) {
        throw ChainError("pure call '" + method + "' failed: " + f.reason);
    }
    std::vector<Value> out;
    for (std::size_t i = 0; i < words.size() && i < m->returns.size(); ++i) out.push_back({m->returns[i], words[i], {}});
    return out;
}

Word WorldState::balance(const Address& a) const {
    auto it = accounts_.find(a);
    return it == accounts_.end() ? Word{0} : it->second.balance;
}

Word WorldState::balance_at(const Address& a, std::uint64_t block_number) const {
    if (block_number >= blocks_.size()) throw ChainError("unknown block " + std::to_string(block_number));
    for (std::uint64_t n = block_number + 1; n-- > 0;) {
        auto it = balance_deltas_[n].find(a);
        if (it != balance_deltas_[n].end()) return it->second;
    }
    return 0;
}

Word WorldState::total_supply() const {
    Word s = 0;
    for (const auto& [addr, acc] : accounts_) s += acc.balance;
    return s;
}

const Account* WorldState::account(const Address& a) const {
    auto it = accounts_.find(a);
    return it == accounts_.end() ? nullptr : &it->second;
}

const Transaction* WorldState::transaction(const Hash32& h) const {
    auto it = tx_index_.find(h);
    return it == tx_index_.end() ? nullptr : &executed_[it->second];
}

const Receipt* WorldState::receipt(const Hash32& h) const {
    auto it = receipts_.find(h);
    return it == receipts_.end() ? nullptr : &it->second;
}

const VmTrace* WorldState::trace(const Hash32& h) const {
    auto it = traces_.find(h);
    return it == traces_.end() ? nullptr : &it->second;
}

}  // namespace replaylab::chain
