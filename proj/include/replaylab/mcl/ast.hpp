// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/core/word.hpp>

namespace replaylab::mcl {

//! Source location kept for diagnostics. Positions never take part in AST
//! equality, so a pretty-printed and re-parsed unit compares equal.
struct SourcePos {
    int line{0};
    int column{0};

    friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

enum class Type {
    kUint,
    kBool,
    kAddress,
    kHash,
    kAddressUintMap,  // map(address => uint), storage only
    kUintArray,       // uint[]: storage array or calldata parameter
};

std::string type_name(Type t);
std::optional<Type> type_from_name(const std::string& name);
bool is_value_type(Type t);

enum class ExprKind {
    kIntLit,
    kAddrLit,  // 0x + exactly 40 written hex digits
    kBoolLit,
    kIdent,
    kIndex,   // name[expr]
    kLength,  // name.length
    kEnv,
    kBuiltin,       // address(e) uint(e) hash(e) blockhash(e) balance(e)
    kContractCast,  // Iface(e)
    kExternalCall,  // Iface(target).method(args...)
    kCreate,        // new C(args...)
    kNot,
    kBinary,
};

enum class EnvVar { kNow, kBlockNumber, kMsgSender, kMsgValue, kThis };

enum class BinOp { kAdd, kSub, kMul, kDiv, kMod, kShl, kShr, kBitAnd, kBitOr, kEq, kNe, kLt, kLe, kGt, kGe, kAnd, kOr };

std::string binop_symbol(BinOp op);

struct Expr {
    ExprKind kind{ExprKind::kIntLit};
    SourcePos pos;
    Word value{0};             // literal value
    std::string text;          // literal text as written; identifier; builtin/contract name
    std::string method;        // kExternalCall
    bool flag{false};          // kBoolLit
    EnvVar env{EnvVar::kNow};  // kEnv
    BinOp op{BinOp::kAdd};     // kBinary
    //! Operands. kExternalCall: args[0] is the call target, the rest are call arguments.
    std::vector<Expr> args;

    friend bool operator==(const Expr&, const Expr&) = default;
};

enum class StmtKind { kLocal, kAssign, kPush, kRequire, kAssert, kEmit, kTransfer, kExpr, kIf, kFor, kReturn };

enum class AssignOp { kSet, kAdd, kSub };

struct Stmt {
    StmtKind kind{StmtKind::kExpr};
    SourcePos pos;
    Type type{Type::kUint};  // kLocal
    std::string name;        // kLocal / kFor variable / kPush target / kEmit event
    AssignOp assign_op{AssignOp::kSet};
    //! kLocal: [init]; kAssign: [target, value]; kPush: [value]; kRequire/kAssert/kIf: [cond];
    //! kEmit: args; kTransfer: [to, amount]; kExpr: [call]; kFor: [from, to]; kReturn: values.
    std::vector<Expr> exprs;
    std::optional<std::string> message;  // kRequire
    std::uint64_t bound{0};              // kFor static iteration bound
    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    bool has_else{false};

    friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct Param {
    Type type{Type::kUint};
    std::string name;
    SourcePos pos;

    friend bool operator==(const Param&, const Param&) = default;
};

struct MethodDef {
    std::string name;
    SourcePos pos;
    std::vector<Param> params;
    std::vector<Type> returns;
    bool pure{false};
    bool payable{false};
    bool is_abstract{false};  // declared with ';' instead of a body
    std::vector<Stmt> body;

    friend bool operator==(const MethodDef&, const MethodDef&) = default;
};

struct EventDef {
    std::string name;
    SourcePos pos;
    std::vector<Param> params;

    friend bool operator==(const EventDef&, const EventDef&) = default;
};

struct StateVar {
    Type type{Type::kUint};
    std::string name;
    SourcePos pos;

    friend bool operator==(const StateVar&, const StateVar&) = default;
};

struct ContractDef {
    std::string name;
    SourcePos pos;
    std::vector<StateVar> state_vars;
    std::vector<EventDef> events;
    std::optional<MethodDef> constructor;
    std::vector<MethodDef> methods;

    [[nodiscard]] const MethodDef* find_method(const std::string& method) const;
    [[nodiscard]] const EventDef* find_event(const std::string& event) const;
    [[nodiscard]] const StateVar* find_state_var(const std::string& var) const;

    friend bool operator==(const ContractDef&, const ContractDef&) = default;
};

struct SourceUnit {
    std::vector<ContractDef> contracts;
    std::string raw_text;

    [[nodiscard]] const ContractDef* find_contract(const std::string& contract) const;

    //! Structural equality; raw_text is not compared.
    friend bool operator==(const SourceUnit& a, const SourceUnit& b) { return a.contracts == b.contracts; }
};

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(int line, int column, const std::string& what);
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

  private:
    int line_;
    int column_;
};

class DeclarationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

SourceUnit parse(const std::string& text);
std::string print(const SourceUnit& unit);

}  // namespace replaylab::mcl
