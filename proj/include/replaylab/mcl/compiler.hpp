// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/mcl/ast.hpp>

namespace replaylab::mcl {

enum class Op : std::uint8_t {
    kEnter,  // a: frame size
    kPush,   // a: constant index
    kLoadLocal,
    kStoreLocal,
    kSload,
    kSstore,
    kMapLoad,  // a: map slot; key on stack
    kMapStore,
    kArrLoad,  // a: storage array slot
    kArrStore,
    kArrPush,
    kArrLen,
    kCdLoad,  // a: local slot of a calldata uint[] parameter
    kCdLen,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kMod,
    kShl,
    kShr,
    kBitAnd,
    kBitOr,
    kEq,
    kNe,
    kLt,
    kLe,
    kGt,
    kGe,
    kNot,
    kLogicAnd,
    kLogicOr,
    kEnv,  // a: EnvVar
    kBlockHash,
    kBalance,
    kCastAddress,
    kCastContract,
    kJump,  // a: target
    kJumpIfNot,
    kBoundCheck,  // a: static iteration bound; pops (from, to)
    kRequire,     // a: 1 + message string index, 0 for none
    kAssert,
    kEmit,      // a: event index, b: argument count
    kTransfer,  // pops (to, amount)
    kCall,      // a: method name string index, b: argument count | return count << 16
    kCreate,    // a: creatable index, b: argument count, pushes created address
    kReturn,    // a: value count
    kPop,
};

std::string op_name(Op op);

struct Instruction {
    Op op{Op::kReturn};
    std::uint32_t a{0};
    std::uint32_t b{0};

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct ParamInfo {
    std::string name;
    Type type{Type::kUint};

    friend bool operator==(const ParamInfo&, const ParamInfo&) = default;
};

struct MethodInfo {
    std::string name;
    std::vector<ParamInfo> params;
    std::vector<Type> returns;
    bool pure{false};
    bool payable{false};
    bool is_abstract{false};
    std::uint32_t entry{0};
    std::uint32_t frame_size{0};

    friend bool operator==(const MethodInfo&, const MethodInfo&) = default;
};

struct EventInfo {
    std::string name;
    std::vector<ParamInfo> params;

    friend bool operator==(const EventInfo&, const EventInfo&) = default;
};

struct StateVarInfo {
    std::string name;
    Type type{Type::kUint};
    std::uint32_t slot{0};  // index within the storage kind (scalar, map or array)

    friend bool operator==(const StateVarInfo&, const StateVarInfo&) = default;
};

//! Method names, parameter types and event signatures of a contract.
struct InterfaceDescriptor {
    std::string contract;
    MethodInfo constructor;
    std::vector<MethodInfo> methods;
    std::vector<EventInfo> events;

    [[nodiscard]] const MethodInfo* find_method(const std::string& name) const;
    [[nodiscard]] const EventInfo* find_event(const std::string& name) const;
    [[nodiscard]] std::vector<MethodInfo> pure_methods() const;

    friend bool operator==(const InterfaceDescriptor&, const InterfaceDescriptor&) = default;
};

struct CompiledContract {
    std::string name;
    std::vector<Instruction> code;
    std::vector<Word> constants;
    std::vector<std::string> strings;
    std::vector<StateVarInfo> state_vars;
    std::uint32_t scalar_slots{0};
    std::uint32_t map_slots{0};
    std::uint32_t array_slots{0};
    InterfaceDescriptor iface;
    std::vector<std::shared_ptr<const CompiledContract>> creatable;
    std::size_t instruction_count{0};

    [[nodiscard]] const MethodInfo* find_method(const std::string& method) const { return iface.find_method(method); }
    //! Canonical byte rendering; equal contracts render identically.
    [[nodiscard]] std::vector<std::uint8_t> bytes() const;
    [[nodiscard]] std::string disassemble() const;
};

class CompileError : public std::runtime_error {
  public:
    CompileError(SourcePos pos, const std::string& what);
    [[nodiscard]] SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

class TypeError : public CompileError {
  public:
    using CompileError::CompileError;
};

class PurityError : public CompileError {
  public:
    using CompileError::CompileError;
};

//! Compiles every contract of the unit, in declaration order.
std::vector<CompiledContract> compile(const SourceUnit& unit);
CompiledContract compile_contract(const SourceUnit& unit, const std::string& contract);

struct LiteralAddress {
    Address address;
    SourcePos pos;
    std::string contract;

    friend bool operator==(const LiteralAddress& a, const LiteralAddress& b) {
        return a.address == b.address && a.pos.line == b.pos.line && a.pos.column == b.pos.column && a.contract == b.contract;
    }
};

struct PureFunction {
    std::string contract;
    std::string name;
    std::vector<ParamInfo> params;
    std::vector<Type> returns;
};

struct StaticFlags {
    bool uses_special_vars{false};
    bool has_contract_casts{false};
    std::vector<PureFunction> pure_functions;
    std::vector<LiteralAddress> literal_addresses;
};

StaticFlags static_flags(const SourceUnit& unit);
//! Flags restricted to one contract of the unit.
StaticFlags static_flags(const SourceUnit& unit, const std::string& contract);

//! Rewrites address-like literals (see static_flags) according to the table. Keeps
//! the literal's written form: address literals stay 40 digits.
SourceUnit substitute_literals(SourceUnit unit, const std::map<Address, Address>& table);

}  // namespace replaylab::mcl
