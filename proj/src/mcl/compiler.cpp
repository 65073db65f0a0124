// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/mcl/compiler.hpp>

#include <functional>
#include <set>
#include <sstream>

namespace replaylab::mcl {

CompileError::CompileError(SourcePos pos, const std::string& what)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what), pos_{pos} {}

std::string op_name(Op op) {
    static const char* kNames[] = {"ENTER", "PUSH",    "LLOAD",   "LSTORE",   "SLOAD",    "SSTORE",    "MLOAD",  "MSTORE",
                                   "ALOAD", "ASTORE",  "APUSH",   "ALEN",     "CDLOAD",   "CDLEN",     "ADD",    "SUB",
                                   "MUL",   "DIV",     "MOD",     "SHL",      "SHR",      "AND",       "OR",     "EQ",
                                   "NE",    "LT",      "LE",      "GT",       "GE",       "NOT",       "LAND",   "LOR",
                                   "ENV",   "BLOCKHASH", "BALANCE", "CASTADDR", "CASTCONTRACT", "JUMP", "JUMPI", "BOUND",
                                   "REQUIRE", "ASSERT", "EMIT",   "TRANSFER", "CALL",     "CREATE",    "RET",    "POP"};
    const auto i = static_cast<std::size_t>(op);
    return i < std::size(kNames) ? kNames[i] : "?";
}

const MethodInfo* InterfaceDescriptor::find_method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

const EventInfo* InterfaceDescriptor::find_event(const std::string& name) const {
    for (const auto& e : events) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::vector<MethodInfo> InterfaceDescriptor::pure_methods() const {
    std::vector<MethodInfo> out;
    for (const auto& m : methods) {
        if (m.pure && !m.is_abstract) out.push_back(m);
    }
    return out;
}

namespace {

    void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
        put_u32(out, static_cast<std::uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }

    void put_method(std::vector<std::uint8_t>& out, const MethodInfo& m) {
        put_str(out, m.name);
        put_u32(out, static_cast<std::uint32_t>(m.params.size()));
        for (const auto& p : m.params) {
            put_str(out, p.name);
            out.push_back(static_cast<std::uint8_t>(p.type));
        }
        put_u32(out, static_cast<std::uint32_t>(m.returns.size()));
        for (auto t : m.returns) out.push_back(static_cast<std::uint8_t>(t));
        out.push_back(static_cast<std::uint8_t>((m.pure ? 1 : 0) | (m.payable ? 2 : 0) | (m.is_abstract ? 4 : 0)));
        put_u32(out, m.entry);
        put_u32(out, m.frame_size);
    }

}  // namespace

std::vector<std::uint8_t> CompiledContract::bytes() const {
    std::vector<std::uint8_t> out;
    put_str(out, name);
    put_u32(out, static_cast<std::uint32_t>(code.size()));
    for (const auto& ins : code) {
        out.push_back(static_cast<std::uint8_t>(ins.op));
        put_u32(out, ins.a);
        put_u32(out, ins.b);
    }
    put_u32(out, static_cast<std::uint32_t>(constants.size()));
    for (const auto& c : constants) put_str(out, word_to_hex(c));
    put_u32(out, static_cast<std::uint32_t>(strings.size()));
    for (const auto& s : strings) put_str(out, s);
    put_u32(out, static_cast<std::uint32_t>(state_vars.size()));
    for (const auto& v : state_vars) {
        put_str(out, v.name);
        out.push_back(static_cast<std::uint8_t>(v.type));
        put_u32(out, v.slot);
    }
    put_method(out, iface.constructor);
    put_u32(out, static_cast<std::uint32_t>(iface.methods.size()));
    for (const auto& m : iface.methods) put_method(out, m);
    put_u32(out, static_cast<std::uint32_t>(iface.events.size()));
    for (const auto& e : iface.events) {
        put_str(out, e.name);
        put_u32(out, static_cast<std::uint32_t>(e.params.size()));
        for (const auto& p : e.params) {
            put_str(out, p.name);
            out.push_back(static_cast<std::uint8_t>(p.type));
        }
    }
    put_u32(out, static_cast<std::uint32_t>(creatable.size()));
    for (const auto& c : creatable) {
        const auto inner = c->bytes();
        put_u32(out, static_cast<std::uint32_t>(inner.size()));
        out.insert(out.end(), inner.begin(), inner.end());
    }
    return out;
}

std::string CompiledContract::disassemble() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < code.size(); ++i) {
        out << i << "\t" << op_name(code[i].op) << " " << code[i].a << " " << code[i].b << "\n";
    }
    return out.str();
}

namespace {

    struct ExprType {
        Type type{Type::kUint};
        std::size_t arity{1};  // 0 for calls without results, >1 for tuples
        bool addr_literal{false};
    };

    struct LocalVar {
        Type type{Type::kUint};
        std::uint32_t slot{0};
    };

    using Cache = std::map<std::string, std::shared_ptr<const CompiledContract>>;

    class ContractCompiler {
      public:
        ContractCompiler(const SourceUnit& unit, const ContractDef& def, Cache& cache, std::vector<std::string>& creating)
            : unit_{unit}, def_{def}, cache_{cache}, creating_{creating} {}

        CompiledContract run() {
            out_.name = def_.name;
            out_.iface.contract = def_.name;
            for (const auto& v : def_.state_vars) {
                StateVarInfo info{v.name, v.type, 0};
                if (v.type == Type::kAddressUintMap) {
                    info.slot = out_.map_slots++;
                } else if (v.type == Type::kUintArray) {
                    info.slot = out_.array_slots++;
                } else {
                    info.slot = out_.scalar_slots++;
                }
                out_.state_vars.push_back(info);
            }
            for (const auto& e : def_.events) {
                EventInfo info{e.name, {}};
                for (const auto& p : e.params) {
                    if (!is_value_type(p.type)) throw TypeError(p.pos, "event parameters must have a value type");
                    info.params.push_back({p.name, p.type});
                }
                out_.iface.events.push_back(std::move(info));
            }
            // Interface first so that calls between methods of the same contract type-check.
            for (const auto& m : def_.methods) out_.iface.methods.push_back(signature(m));
            if (def_.constructor) {
                out_.iface.constructor = signature(*def_.constructor);
            } else {
                out_.iface.constructor.name = "constructor";
            }
            out_.iface.constructor.entry = compile_method(def_.constructor ? &*def_.constructor : nullptr, out_.iface.constructor);
            for (std::size_t i = 0; i < def_.methods.size(); ++i) {
                if (def_.methods[i].is_abstract) continue;
                out_.iface.methods[i].entry = compile_method(&def_.methods[i], out_.iface.methods[i]);
            }
            out_.instruction_count = out_.code.size();
            return std::move(out_);
        }

      private:
        static MethodInfo signature(const MethodDef& m) {
            MethodInfo info;
            info.name = m.name;
            info.pure = m.pure;
            info.payable = m.payable;
            info.is_abstract = m.is_abstract;
            info.returns = m.returns;
            for (const auto& p : m.params) {
                if (p.type == Type::kAddressUintMap) throw TypeError(p.pos, "map parameters are not supported");
                info.params.push_back({p.name, p.type});
            }
            for (auto t : m.returns) {
                if (!is_value_type(t)) throw TypeError(m.pos, "methods can only return value types");
            }
            if (m.pure && m.payable) throw PurityError(m.pos, "a pure method cannot be payable");
            return info;
        }

        // -- emission helpers

        std::uint32_t emit(Op op, std::uint32_t a = 0, std::uint32_t b = 0) {
            out_.code.push_back({op, a, b});
            return static_cast<std::uint32_t>(out_.code.size() - 1);
        }
        std::uint32_t here() const { return static_cast<std::uint32_t>(out_.code.size()); }
        void patch(std::uint32_t at, std::uint32_t target) { out_.code[at].a = target; }

        std::uint32_t constant(const Word& w) {
            auto it = const_index_.find(w);
            if (it != const_index_.end()) return it->second;
            out_.constants.push_back(w);
            const auto idx = static_cast<std::uint32_t>(out_.constants.size() - 1);
            const_index_.emplace(w, idx);
            return idx;
        }

        std::uint32_t string_index(const std::string& s) {
            for (std::size_t i = 0; i < out_.strings.size(); ++i) {
                if (out_.strings[i] == s) return static_cast<std::uint32_t>(i);
            }
            out_.strings.push_back(s);
            return static_cast<std::uint32_t>(out_.strings.size() - 1);
        }

        const StateVarInfo* state_var(const std::string& name) const {
            for (const auto& v : out_.state_vars) {
                if (v.name == name) return &v;
            }
            return nullptr;
        }

        const LocalVar* local(const std::string& name) const {
            for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
                auto f = it->find(name);
                if (f != it->end()) return &f->second;
            }
            return nullptr;
        }

        std::uint32_t declare(const std::string& name, Type t, const SourcePos& pos) {
            if (local(name) || state_var(name)) throw TypeError(pos, "redeclaration of '" + name + "'");
            const LocalVar v{t, frame_size_++};
            scopes_.back().emplace(name, v);
            return v.slot;
        }

        void require_not_pure(const SourcePos& pos, const std::string& what) const {
            if (pure_) throw PurityError(pos, "pure method '" + method_name_ + "' cannot " + what);
        }

        static bool assignable(const ExprType& got, Type want) {
            if (got.arity != 1) return false;
            return got.type == want || (got.addr_literal && want == Type::kUint);
        }

        void expect(const ExprType& got, Type want, const SourcePos& pos, const std::string& ctx) {
            if (!assignable(got, want)) {
                const std::string g = got.arity == 1 ? type_name(got.type) : got.arity == 0 ? "no value" : "tuple";
                throw TypeError(pos, ctx + ": expected " + type_name(want) + ", got " + g);
            }
        }

        // -- methods

        std::uint32_t compile_method(const MethodDef* m, MethodInfo& info) {
            scopes_.clear();
            scopes_.emplace_back();
            frame_size_ = 0;
            pure_ = info.pure;
            method_name_ = info.name;
            returns_ = info.returns;
            in_constructor_ = m == nullptr || info.name == "constructor";
            const SourcePos pos = m ? m->pos : def_.pos;
            if (m) {
                for (const auto& p : m->params) declare(p.name, p.type, p.pos);
            }
            const auto entry = emit(Op::kEnter);
            if (m) block(m->body);
            for (auto t : returns_) {
                (void)t;
                emit(Op::kPush, constant(0));
            }
            emit(Op::kReturn, static_cast<std::uint32_t>(returns_.size()));
            out_.code[entry].a = frame_size_;
            info.frame_size = frame_size_;
            (void)pos;
            return entry;
        }

        void block(const std::vector<Stmt>& body) {
            scopes_.emplace_back();
            for (const auto& s : body) stmt(s);
            scopes_.pop_back();
        }

        void stmt(const Stmt& s) {
            switch (s.kind) {
                case StmtKind::kLocal: {
                    const auto t = expr(s.exprs.at(0));
                    expect(t, s.type, s.pos, "initializer of '" + s.name + "'");
                    const auto slot = declare(s.name, s.type, s.pos);
                    emit(Op::kStoreLocal, slot);
                    return;
                }
                case StmtKind::kAssign:
                    assign(s);
                    return;
                case StmtKind::kPush: {
                    const auto* v = state_var(s.name);
                    if (!v || v->type != Type::kUintArray) throw TypeError(s.pos, "'" + s.name + "' is not a storage array");
                    require_not_pure(s.pos, "modify storage");
                    expect(expr(s.exprs.at(0)), Type::kUint, s.pos, "push");
                    emit(Op::kArrPush, v->slot);
                    return;
                }
                case StmtKind::kRequire: {
                    expect(expr(s.exprs.at(0)), Type::kBool, s.pos, "require condition");
                    emit(Op::kRequire, s.message ? string_index(*s.message) + 1 : 0);
                    return;
                }
                case StmtKind::kAssert:
                    expect(expr(s.exprs.at(0)), Type::kBool, s.pos, "assert condition");
                    emit(Op::kAssert);
                    return;
                case StmtKind::kEmit: {
                    require_not_pure(s.pos, "emit events");
                    const auto* ev = out_.iface.find_event(s.name);
                    if (!ev) throw TypeError(s.pos, "unknown event '" + s.name + "'");
                    if (ev->params.size() != s.exprs.size()) throw TypeError(s.pos, "wrong argument count for event '" + s.name + "'");
                    for (std::size_t i = 0; i < s.exprs.size(); ++i) {
                        expect(expr(s.exprs[i]), ev->params[i].type, s.exprs[i].pos, "event argument");
                    }
                    const auto idx = static_cast<std::uint32_t>(ev - out_.iface.events.data());
                    emit(Op::kEmit, idx, static_cast<std::uint32_t>(s.exprs.size()));
                    return;
                }
                case StmtKind::kTransfer:
                    require_not_pure(s.pos, "transfer value");
                    expect(expr(s.exprs.at(0)), Type::kAddress, s.pos, "transfer recipient");
                    expect(expr(s.exprs.at(1)), Type::kUint, s.pos, "transfer amount");
                    emit(Op::kTransfer);
                    return;
                case StmtKind::kExpr: {
                    const auto t = expr(s.exprs.at(0));
                    for (std::size_t i = 0; i < t.arity; ++i) emit(Op::kPop);
                    return;
                }
                case StmtKind::kIf: {
                    expect(expr(s.exprs.at(0)), Type::kBool, s.pos, "if condition");
                    const auto jf = emit(Op::kJumpIfNot);
                    block(s.body);
                    if (s.has_else) {
                        const auto j = emit(Op::kJump);
                        patch(jf, here());
                        block(s.else_body);
                        patch(j, here());
                    } else {
                        patch(jf, here());
                    }
                    return;
                }
                case StmtKind::kFor: {
                    scopes_.emplace_back();
                    expect(expr(s.exprs.at(0)), Type::kUint, s.pos, "loop start");
                    const auto var = declare(s.name, Type::kUint, s.pos);
                    emit(Op::kStoreLocal, var);
                    expect(expr(s.exprs.at(1)), Type::kUint, s.pos, "loop end");
                    const auto end = frame_size_++;
                    emit(Op::kStoreLocal, end);
                    emit(Op::kLoadLocal, var);
                    emit(Op::kLoadLocal, end);
                    emit(Op::kBoundCheck, static_cast<std::uint32_t>(s.bound));
                    const auto top = here();
                    emit(Op::kLoadLocal, var);
                    emit(Op::kLoadLocal, end);
                    emit(Op::kLt);
                    const auto exit = emit(Op::kJumpIfNot);
                    block(s.body);
                    emit(Op::kLoadLocal, var);
                    emit(Op::kPush, constant(1));
                    emit(Op::kAdd);
                    emit(Op::kStoreLocal, var);
                    emit(Op::kJump, top);
                    patch(exit, here());
                    scopes_.pop_back();
                    return;
                }
                case StmtKind::kReturn: {
                    if (in_constructor_ && !s.exprs.empty()) throw TypeError(s.pos, "constructor cannot return values");
                    if (!s.exprs.empty() && s.exprs.size() != returns_.size()) {
                        throw TypeError(s.pos, "method '" + method_name_ + "' returns " + std::to_string(returns_.size()) + " values");
                    }
                    if (s.exprs.empty()) {
                        for (std::size_t i = 0; i < returns_.size(); ++i) emit(Op::kPush, constant(0));
                    }
                    for (std::size_t i = 0; i < s.exprs.size(); ++i) {
                        expect(expr(s.exprs[i]), returns_[i], s.exprs[i].pos, "return value");
                    }
                    emit(Op::kReturn, static_cast<std::uint32_t>(returns_.size()));
                    return;
                }
            }
        }

        void assign(const Stmt& s) {
            const Expr& target = s.exprs.at(0);
            const Expr& value = s.exprs.at(1);
            const bool compound = s.assign_op != AssignOp::kSet;
            const Op arith = s.assign_op == AssignOp::kAdd ? Op::kAdd : Op::kSub;
            if (target.kind == ExprKind::kIdent) {
                if (const auto* l = local(target.text)) {
                    if (!is_value_type(l->type)) throw TypeError(s.pos, "cannot assign to array parameter '" + target.text + "'");
                    if (compound) {
                        if (l->type != Type::kUint) throw TypeError(s.pos, "compound assignment needs uint");
                        emit(Op::kLoadLocal, l->slot);
                    }
                    expect(expr(value), l->type, s.pos, "assignment to '" + target.text + "'");
                    if (compound) emit(arith);
                    emit(Op::kStoreLocal, l->slot);
                    return;
                }
                const auto* v = state_var(target.text);
                if (!v) throw TypeError(target.pos, "undeclared identifier '" + target.text + "'");
                if (!is_value_type(v->type)) throw TypeError(s.pos, "cannot assign whole storage collection '" + v->name + "'");
                require_not_pure(s.pos, "modify storage");
                if (compound) {
                    if (v->type != Type::kUint) throw TypeError(s.pos, "compound assignment needs uint");
                    emit(Op::kSload, v->slot);
                }
                expect(expr(value), v->type, s.pos, "assignment to '" + v->name + "'");
                if (compound) emit(arith);
                emit(Op::kSstore, v->slot);
                return;
            }
            // indexed storage
            if (local(target.text)) throw TypeError(s.pos, "calldata array '" + target.text + "' is read-only");
            const auto* v = state_var(target.text);
            if (!v) throw TypeError(target.pos, "undeclared identifier '" + target.text + "'");
            require_not_pure(s.pos, "modify storage");
            Op load{};
            Op store{};
            Type key{};
            if (v->type == Type::kAddressUintMap) {
                load = Op::kMapLoad;
                store = Op::kMapStore;
                key = Type::kAddress;
            } else if (v->type == Type::kUintArray) {
                load = Op::kArrLoad;
                store = Op::kArrStore;
                key = Type::kUint;
            } else {
                throw TypeError(target.pos, "'" + v->name + "' cannot be indexed");
            }
            expect(expr(target.args.at(0)), key, target.pos, "index");
            if (compound) {
                expect(expr(target.args.at(0)), key, target.pos, "index");
                emit(load, v->slot);
            }
            expect(expr(value), Type::kUint, s.pos, "assignment to '" + v->name + "'");
            if (compound) emit(arith);
            emit(store, v->slot);
        }

        // -- expressions

        ExprType expr(const Expr& e) {
            switch (e.kind) {
                case ExprKind::kIntLit:
                    emit(Op::kPush, constant(e.value));
                    return {Type::kUint};
                case ExprKind::kAddrLit:
                    emit(Op::kPush, constant(e.value));
                    return {Type::kAddress, 1, true};
                case ExprKind::kBoolLit:
                    emit(Op::kPush, constant(e.flag ? 1 : 0));
                    return {Type::kBool};
                case ExprKind::kIdent: {
                    if (const auto* l = local(e.text)) {
                        if (!is_value_type(l->type)) throw TypeError(e.pos, "array '" + e.text + "' used as a value");
                        emit(Op::kLoadLocal, l->slot);
                        return {l->type};
                    }
                    const auto* v = state_var(e.text);
                    if (!v) throw TypeError(e.pos, "undeclared identifier '" + e.text + "'");
                    if (!is_value_type(v->type)) throw TypeError(e.pos, "storage collection '" + e.text + "' used as a value");
                    emit(Op::kSload, v->slot);
                    return {v->type};
                }
                case ExprKind::kIndex: {
                    if (const auto* l = local(e.text)) {
                        if (l->type != Type::kUintArray) throw TypeError(e.pos, "'" + e.text + "' cannot be indexed");
                        expect(expr(e.args.at(0)), Type::kUint, e.pos, "index");
                        emit(Op::kCdLoad, l->slot);
                        return {Type::kUint};
                    }
                    const auto* v = state_var(e.text);
                    if (!v) throw TypeError(e.pos, "undeclared identifier '" + e.text + "'");
                    if (v->type == Type::kAddressUintMap) {
                        expect(expr(e.args.at(0)), Type::kAddress, e.pos, "map key");
                        emit(Op::kMapLoad, v->slot);
                    } else if (v->type == Type::kUintArray) {
                        expect(expr(e.args.at(0)), Type::kUint, e.pos, "index");
                        emit(Op::kArrLoad, v->slot);
                    } else {
                        throw TypeError(e.pos, "'" + e.text + "' cannot be indexed");
                    }
                    return {Type::kUint};
                }
                case ExprKind::kLength: {
                    if (const auto* l = local(e.text)) {
                        if (l->type != Type::kUintArray) throw TypeError(e.pos, "'" + e.text + "' has no length");
                        emit(Op::kCdLen, l->slot);
                        return {Type::kUint};
                    }
                    const auto* v = state_var(e.text);
                    if (!v || v->type != Type::kUintArray) throw TypeError(e.pos, "'" + e.text + "' has no length");
                    emit(Op::kArrLen, v->slot);
                    return {Type::kUint};
                }
                case ExprKind::kEnv:
                    emit(Op::kEnv, static_cast<std::uint32_t>(e.env));
                    return {e.env == EnvVar::kMsgSender || e.env == EnvVar::kThis ? Type::kAddress : Type::kUint};
                case ExprKind::kBuiltin:
                    return builtin(e);
                case ExprKind::kContractCast: {
                    if (!unit_.find_contract(e.text)) throw TypeError(e.pos, "unknown contract '" + e.text + "'");
                    expect(expr(e.args.at(0)), Type::kAddress, e.pos, "contract cast");
                    emit(Op::kCastContract);
                    return {Type::kAddress};
                }
                case ExprKind::kExternalCall:
                    return external_call(e);
                case ExprKind::kCreate:
                    return create(e);
                case ExprKind::kNot:
                    expect(expr(e.args.at(0)), Type::kBool, e.pos, "operand of '!'");
                    emit(Op::kNot);
                    return {Type::kBool};
                case ExprKind::kBinary:
                    return binary(e);
            }
            throw TypeError(e.pos, "unsupported expression");
        }

        ExprType builtin(const Expr& e) {
            const Expr& arg = e.args.at(0);
            if (e.text == "address") {
                const auto t = expr(arg);
                if (t.arity == 1 && t.type == Type::kAddress) return {Type::kAddress, 1, t.addr_literal};
                expect(t, Type::kUint, e.pos, "address()");
                emit(Op::kCastAddress);
                return {Type::kAddress};
            }
            if (e.text == "uint") {
                const auto t = expr(arg);
                if (t.arity != 1) throw TypeError(e.pos, "uint() needs a value");
                return {Type::kUint};
            }
            if (e.text == "hash") {
                const auto t = expr(arg);
                if (t.arity != 1 || (t.type != Type::kUint && t.type != Type::kHash)) throw TypeError(e.pos, "hash() needs uint or hash");
                return {Type::kHash};
            }
            if (e.text == "blockhash") {
                expect(expr(arg), Type::kUint, e.pos, "blockhash()");
                emit(Op::kBlockHash);
                return {Type::kHash};
            }
            if (e.text == "balance") {
                expect(expr(arg), Type::kAddress, e.pos, "balance()");
                emit(Op::kBalance);
                return {Type::kUint};
            }
            throw TypeError(e.pos, "unknown builtin '" + e.text + "'");
        }

        ExprType external_call(const Expr& e) {
            const auto* target = unit_.find_contract(e.text);
            if (!target) throw TypeError(e.pos, "unknown contract '" + e.text + "'");
            const auto* m = target->find_method(e.method);
            if (!m) throw TypeError(e.pos, "contract '" + e.text + "' has no method '" + e.method + "'");
            if (!m->pure) require_not_pure(e.pos, "call non-pure method '" + e.method + "'");
            expect(expr(e.args.at(0)), Type::kAddress, e.pos, "call target");
            if (m->params.size() + 1 != e.args.size()) throw TypeError(e.pos, "wrong argument count for '" + e.method + "'");
            for (std::size_t i = 0; i < m->params.size(); ++i) {
                const auto t = expr(e.args[i + 1]);
                if (!is_value_type(m->params[i].type)) throw TypeError(e.pos, "array arguments cannot be passed between contracts");
                expect(t, m->params[i].type, e.args[i + 1].pos, "argument '" + m->params[i].name + "'");
            }
            emit(Op::kCall, string_index(e.method),
                 static_cast<std::uint32_t>(m->params.size() | (m->returns.size() << 16)));
            if (m->returns.size() == 1) return {m->returns[0]};
            return {Type::kUint, m->returns.size()};
        }

        ExprType create(const Expr& e) {
            require_not_pure(e.pos, "create contracts");
            const auto* target = unit_.find_contract(e.text);
            if (!target) throw TypeError(e.pos, "unknown contract '" + e.text + "'");
            for (const auto& c : creating_) {
                if (c == e.text) throw TypeError(e.pos, "recursive creation of '" + e.text + "'");
            }
            std::shared_ptr<const CompiledContract> compiled;
            if (auto it = cache_.find(e.text); it != cache_.end()) {
                compiled = it->second;
            } else {
                creating_.push_back(e.text);
                compiled = std::make_shared<const CompiledContract>(ContractCompiler{unit_, *target, cache_, creating_}.run());
                creating_.pop_back();
                cache_.emplace(e.text, compiled);
            }
            const auto& ctor = compiled->iface.constructor;
            if (ctor.params.size() != e.args.size()) throw TypeError(e.pos, "wrong argument count for constructor of '" + e.text + "'");
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (!is_value_type(ctor.params[i].type)) throw TypeError(e.pos, "array arguments cannot be passed between contracts");
                expect(expr(e.args[i]), ctor.params[i].type, e.args[i].pos, "constructor argument");
            }
            std::uint32_t idx = 0;
            for (; idx < out_.creatable.size(); ++idx) {
                if (out_.creatable[idx]->name == e.text) break;
            }
            if (idx == out_.creatable.size()) out_.creatable.push_back(compiled);
            emit(Op::kCreate, idx, static_cast<std::uint32_t>(e.args.size()));
            return {Type::kAddress};
        }

        ExprType binary(const Expr& e) {
            const auto l = expr(e.args.at(0));
            const auto r = expr(e.args.at(1));
            const auto both = [&](Type t, const char* what) {
                expect(l, t, e.args[0].pos, std::string("left operand of ") + what);
                expect(r, t, e.args[1].pos, std::string("right operand of ") + what);
            };
            switch (e.op) {
                case BinOp::kAdd:
                case BinOp::kSub:
                case BinOp::kMul:
                case BinOp::kDiv:
                case BinOp::kMod:
                case BinOp::kShl:
                case BinOp::kShr:
                case BinOp::kBitAnd:
                case BinOp::kBitOr: {
                    both(Type::kUint, binop_symbol(e.op).c_str());
                    static const std::map<BinOp, Op> kArith = {{BinOp::kAdd, Op::kAdd}, {BinOp::kSub, Op::kSub},
                                                               {BinOp::kMul, Op::kMul}, {BinOp::kDiv, Op::kDiv},
                                                               {BinOp::kMod, Op::kMod}, {BinOp::kShl, Op::kShl},
                                                               {BinOp::kShr, Op::kShr}, {BinOp::kBitAnd, Op::kBitAnd},
                                                               {BinOp::kBitOr, Op::kBitOr}};
                    emit(kArith.at(e.op));
                    return {Type::kUint};
                }
                case BinOp::kEq:
                case BinOp::kNe: {
                    const bool ok = l.arity == 1 && r.arity == 1 &&
                                    (l.type == r.type || (l.addr_literal && r.type == Type::kUint) ||
                                     (r.addr_literal && l.type == Type::kUint));
                    if (!ok) throw TypeError(e.pos, "operands of '" + binop_symbol(e.op) + "' have different types");
                    emit(e.op == BinOp::kEq ? Op::kEq : Op::kNe);
                    return {Type::kBool};
                }
                case BinOp::kLt:
                case BinOp::kLe:
                case BinOp::kGt:
                case BinOp::kGe: {
                    both(Type::kUint, binop_symbol(e.op).c_str());
                    emit(e.op == BinOp::kLt ? Op::kLt : e.op == BinOp::kLe ? Op::kLe : e.op == BinOp::kGt ? Op::kGt : Op::kGe);
                    return {Type::kBool};
                }
                case BinOp::kAnd:
                case BinOp::kOr:
                    both(Type::kBool, binop_symbol(e.op).c_str());
                    emit(e.op == BinOp::kAnd ? Op::kLogicAnd : Op::kLogicOr);
                    return {Type::kBool};
            }
            throw TypeError(e.pos, "unsupported operator");
        }

        const SourceUnit& unit_;
        const ContractDef& def_;
        Cache& cache_;
        std::vector<std::string>& creating_;
        CompiledContract out_;
        std::map<Word, std::uint32_t> const_index_;
        std::vector<std::map<std::string, LocalVar>> scopes_;
        std::uint32_t frame_size_{0};
        bool pure_{false};
        bool in_constructor_{false};
        std::string method_name_;
        std::vector<Type> returns_;
    };

}  // namespace

CompiledContract compile_contract(const SourceUnit& unit, const std::string& contract) {
    const auto* def = unit.find_contract(contract);
    if (!def) throw CompileError({}, "no contract named '" + contract + "'");
    Cache cache;
    std::vector<std::string> creating{contract};
    return ContractCompiler{unit, *def, cache, creating}.run();
}

std::vector<CompiledContract> compile(const SourceUnit& unit) {
    std::vector<CompiledContract> out;
    for (const auto& c : unit.contracts) out.push_back(compile_contract(unit, c.name));
    return out;
}

// -- static analysis

namespace {

    bool address_like_int(const Word& v) { return v >= (Word{1} << 156) && v < (Word{1} << 160); }

    void walk_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
        fn(e);
        for (const auto& a : e.args) walk_expr(a, fn);
    }

    void walk_stmts(const std::vector<Stmt>& body, const std::function<void(const Expr&)>& fn) {
        for (const auto& s : body) {
            for (const auto& e : s.exprs) walk_expr(e, fn);
            walk_stmts(s.body, fn);
            walk_stmts(s.else_body, fn);
        }
    }

    void walk_contract(const ContractDef& c, const std::function<void(const Expr&)>& fn) {
        if (c.constructor) walk_stmts(c.constructor->body, fn);
        for (const auto& m : c.methods) walk_stmts(m.body, fn);
    }

    void flags_of(const ContractDef& c, StaticFlags& out) {
        walk_contract(c, [&](const Expr& e) {
            if (e.kind == ExprKind::kEnv && (e.env == EnvVar::kNow || e.env == EnvVar::kBlockNumber)) out.uses_special_vars = true;
            if (e.kind == ExprKind::kBuiltin && e.text == "blockhash") out.uses_special_vars = true;
            if (e.kind == ExprKind::kContractCast || e.kind == ExprKind::kExternalCall) out.has_contract_casts = true;
            if (e.kind == ExprKind::kAddrLit || (e.kind == ExprKind::kIntLit && address_like_int(e.value))) {
                out.literal_addresses.push_back({Address::from_word(e.value), e.pos, c.name});
            }
        });
        for (const auto& m : c.methods) {
            if (!m.pure || m.is_abstract) continue;
            PureFunction f{c.name, m.name, {}, m.returns};
            for (const auto& p : m.params) f.params.push_back({p.name, p.type});
            out.pure_functions.push_back(std::move(f));
        }
    }

    void rewrite_expr(Expr& e, const std::map<Address, Address>& table) {
        const bool addr = e.kind == ExprKind::kAddrLit;
        if (addr || (e.kind == ExprKind::kIntLit && address_like_int(e.value))) {
            auto it = table.find(Address::from_word(e.value));
            if (it != table.end()) {
                e.value = it->second.to_word();
                e.text = addr ? it->second.hex() : word_to_dec(e.value);
            }
        }
        for (auto& a : e.args) rewrite_expr(a, table);
    }

    void rewrite_stmts(std::vector<Stmt>& body, const std::map<Address, Address>& table) {
        for (auto& s : body) {
            for (auto& e : s.exprs) rewrite_expr(e, table);
            rewrite_stmts(s.body, table);
            rewrite_stmts(s.else_body, table);
        }
    }

}  // namespace

StaticFlags static_flags(const SourceUnit& unit) {
    StaticFlags out;
    for (const auto& c : unit.contracts) flags_of(c, out);
    return out;
}

StaticFlags static_flags(const SourceUnit& unit, const std::string& contract) {
    StaticFlags out;
    if (const auto* c = unit.find_contract(contract)) flags_of(*c, out);
    return out;
}

SourceUnit substitute_literals(SourceUnit unit, const std::map<Address, Address>& table) {
    for (auto& c : unit.contracts) {
        if (c.constructor) rewrite_stmts(c.constructor->body, table);
        for (auto& m : c.methods) rewrite_stmts(m.body, table);
    }
    unit.raw_text = print(unit);
    return unit;
}

}  // namespace replaylab::mcl
