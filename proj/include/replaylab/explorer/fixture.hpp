// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/chain/json.hpp>

namespace replaylab::explorer {

using chain::Json;

class FixtureError : public std::runtime_error {
  public:
    FixtureError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

//! Immutable, query-ready view of a chain snapshot.
class FixtureStore {
  public:
    static FixtureStore load(std::istream& in);
    static FixtureStore from_text(const std::string& text);

    //! Answers one explorer query. Returns the {"status","message","result"} envelope.
    [[nodiscard]] Json query(const std::map<std::string, std::string>& params) const;

    [[nodiscard]] std::size_t contract_count() const { return contracts_.size(); }
    [[nodiscard]] std::vector<Address> contract_addresses() const;

  private:
    Json source_code(const Address& a) const;
    Json tx_list(const Address& a, std::size_t limit) const;
    Json logs(const Address& a) const;
    Json balance(const Address& a, std::uint64_t block) const;
    Json internal_by_tx(const Hash32& h) const;
    Json internal_by_address(const Address& a) const;
    Json tx_by_hash(const Hash32& h) const;

    std::map<Address, Json> contracts_;
    std::vector<Json> txs_;  // execution order
    std::map<Hash32, std::size_t> tx_pos_;
    std::map<Hash32, std::vector<Json>> internal_;  // parent hash -> internal txs
    std::vector<Json> internal_order_;
    std::vector<Json> logs_;
    std::map<Address, std::vector<std::pair<std::uint64_t, std::string>>> balances_;
};

}  // namespace replaylab::explorer
