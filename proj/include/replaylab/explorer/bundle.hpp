// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include <replaylab/chain/json.hpp>

namespace replaylab::explorer {

using chain::Json;

//! How the contract came into existence. For internal creations `from` is the creating contract
//! and `tx_hash` the external transaction that triggered it.
struct CreationInfo {
    Hash32 tx_hash;
    bool internal{false};
    Address from;
    std::vector<chain::Value> args;
    Word value{0};
    std::uint64_t block_number{0};
    std::uint64_t timestamp{0};
    std::uint64_t gas_limit{0};

    friend bool operator==(const CreationInfo&, const CreationInfo&) = default;
};

//! Everything fetched from the explorer for one contract.
struct HistoricBundle {
    Address contract_address;
    std::string contract_name;
    std::string source;
    mcl::InterfaceDescriptor iface;
    CreationInfo creation;
    //! First T transactions; receipts carry their events and internal transactions.
    std::vector<chain::TxRecord> transactions;
    std::vector<chain::EventRecord> event_logs;
    std::map<std::pair<Address, std::uint64_t>, Word> balances;
    std::map<Hash32, std::vector<chain::Transaction>> internal_trace;
    //! Internal transactions into this contract, from any transaction on the chain.
    std::vector<chain::Transaction> incoming_internal;
    std::size_t requested_T{0};
    bool clamped{false};
    bool partial{false};
    std::vector<std::string> partial_reasons;

    [[nodiscard]] std::size_t T() const { return transactions.size(); }
    //! The bundle restricted to its first t transactions.
    [[nodiscard]] HistoricBundle prefix(std::size_t t) const;
};

Json bundle_to_json(const HistoricBundle& b);
HistoricBundle bundle_from_json(const Json& j);

}  // namespace replaylab::explorer
