// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/core/word.hpp>
#include <replaylab/mcl/compiler.hpp>

namespace replaylab::chain {

//! A typed argument or return value. Arrays use `items`; everything else uses `word`.
struct Value {
    mcl::Type type{mcl::Type::kUint};
    Word word{0};
    std::vector<Word> items;

    static Value uint(const Word& w) { return {mcl::Type::kUint, w, {}}; }
    static Value boolean(bool b) { return {mcl::Type::kBool, b ? 1 : 0, {}}; }
    static Value address(const Address& a) { return {mcl::Type::kAddress, a.to_word(), {}}; }
    static Value array(std::vector<Word> items) { return {mcl::Type::kUintArray, 0, std::move(items)}; }

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Value&, const Value&) = default;
};

enum class Status { kSuccess, kFailed, kOutOfGas };

std::string status_name(Status s);
Status status_from_name(const std::string& s);

enum class Origin { kExternal, kInternal };

struct Account {
    Address address;
    Word balance{0};
    std::uint64_t nonce{0};
    std::shared_ptr<const mcl::CompiledContract> code;  // null for externally owned accounts
    std::vector<Word> scalars;
    std::vector<std::map<Address, Word>> maps;
    std::vector<std::vector<Word>> arrays;

    [[nodiscard]] bool is_contract() const { return code != nullptr; }

    friend bool operator==(const Account&, const Account&) = default;
};

struct Block {
    std::uint64_t number{0};
    std::uint64_t timestamp{0};
    Hash32 hash;
    Hash32 parent_hash;
    std::vector<Hash32> tx_hashes;

    friend bool operator==(const Block&, const Block&) = default;
};

struct Transaction {
    Hash32 hash;
    Address from;
    std::optional<Address> to;  // nullopt: contract creation
    Word value{0};
    std::uint64_t gas_limit{0};
    std::string method;
    std::vector<Value> args;
    Origin origin{Origin::kExternal};
    std::optional<Hash32> parent_tx;

    // Creation payload (external creations carry code and source; internal ones only the name).
    std::shared_ptr<const mcl::CompiledContract> code;
    std::string source;
    std::string contract_name;
    std::optional<Address> created;  // filled for creations once executed

    [[nodiscard]] bool is_create() const { return !to.has_value(); }

    friend bool operator==(const Transaction& a, const Transaction& b) {
        return a.hash == b.hash && a.from == b.from && a.to == b.to && a.value == b.value && a.gas_limit == b.gas_limit &&
               a.method == b.method && a.args == b.args && a.origin == b.origin && a.parent_tx == b.parent_tx &&
               a.contract_name == b.contract_name && a.created == b.created;
    }
};

struct EventParam {
    std::string name;
    mcl::Type type{mcl::Type::kUint};
    Word value{0};

    friend bool operator==(const EventParam&, const EventParam&) = default;
};

struct EventRecord {
    Address emitter;
    std::string name;
    std::vector<EventParam> params;
    Hash32 tx_hash;
    std::uint64_t log_index{0};
    std::uint64_t block_number{0};

    [[nodiscard]] const EventParam* param(const std::string& n) const;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct Receipt {
    Hash32 tx_hash;
    Status status{Status::kSuccess};
    std::uint64_t gas_used{0};
    std::vector<EventRecord> events;
    std::optional<std::string> failure_reason;
    std::uint64_t block_number{0};
    std::vector<Transaction> internal_txs;
    std::optional<Address> contract_address;

    friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct AddressCast {
    Word value{0};
    Address decoded;

    friend bool operator==(const AddressCast&, const AddressCast&) = default;
};

struct CallEdge {
    Address caller;
    Address callee;
    std::string method;

    friend bool operator==(const CallEdge&, const CallEdge&) = default;
};

struct VmTrace {
    //! code address -> instruction index -> execution count
    std::map<Address, std::map<std::uint32_t, std::uint64_t>> executed;
    std::vector<AddressCast> address_casts;
    std::vector<CallEdge> call_edges;

    [[nodiscard]] std::set<std::uint32_t> executed_indices(const Address& code_address) const;

    friend bool operator==(const VmTrace&, const VmTrace&) = default;
};

//! Registry entry for every contract created on a chain.
struct ContractRecord {
    Address address;
    std::string name;
    std::string source;
    Hash32 creation_tx;
    bool created_internal{false};
    Address creator;
    std::vector<Value> constructor_args;
    Word value{0};
};

class ChainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnknownSender : public ChainError {
  public:
    using ChainError::ChainError;
};

}  // namespace replaylab::chain
