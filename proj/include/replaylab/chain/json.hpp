// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include <replaylab/chain/world_state.hpp>

namespace replaylab::chain {

using Json = nlohmann::json;

//! An executed transaction together with its receipt and block timestamp.
struct TxRecord {
    Transaction tx;
    Receipt receipt;
    std::uint64_t timestamp{0};

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

Json value_to_json(const Value& v);
Value value_from_json(const Json& j);

Json event_to_json(const EventRecord& e);
EventRecord event_from_json(const Json& j);

//! Internal transactions: {hash, parent_tx, from, to, contract_address, contract_name, value, method, args}.
Json internal_tx_to_json(const Transaction& t);
Transaction internal_tx_from_json(const Json& j);

//! Account-list record: hash, from, to, value, gas_limit, method, args, block_number, timestamp,
//! status, gas_used, failure_reason (plus contract_address for creations).
Json tx_record_to_json(const TxRecord& r);
//! Receipt events and internal transactions are not part of the record; callers attach them.
TxRecord tx_record_from_json(const Json& j);

Json interface_to_json(const mcl::InterfaceDescriptor& iface);
mcl::InterfaceDescriptor interface_from_json(const Json& j);

Json block_to_json(const Block& b);
Block block_from_json(const Json& j);

//! Line-delimited snapshot of a chain, one object per line. Line kinds: meta, account, block,
//! tx, internal_tx, log, balance, contract. Byte-identical for identical chains.
std::string export_snapshot(const WorldState& state);

}  // namespace replaylab::chain
