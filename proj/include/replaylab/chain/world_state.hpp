// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <replaylab/chain/types.hpp>

namespace replaylab::chain {

struct ChainConfig {
    Word gas_price{0};
    //! Receives fees when gas_price > 0, keeping total supply constant.
    Address coinbase{derive_address("coinbase", 0)};
};

//! Single-owner chain state. Copyable; copies are independent.
class WorldState {
  public:
    static constexpr std::size_t kMaxCallDepth = 64;
    static constexpr std::uint64_t kBlockhashWindow = 256;

    static WorldState genesis(const std::vector<std::pair<Address, Word>>& endowments, ChainConfig config = {});

    //! Queues a transaction and returns its pending position. Assigns the hash.
    std::size_t submit(Transaction tx);
    std::pair<Block, std::vector<Receipt>> mine_block(std::uint64_t timestamp);

    [[nodiscard]] std::vector<Value> call_pure(const Address& contract, const std::string& method,
                                               const std::vector<Value>& args) const;

    [[nodiscard]] Word balance(const Address& a) const;
    [[nodiscard]] Word balance_at(const Address& a, std::uint64_t block_number) const;
    //! Hash of block n when n lies in the window below the block currently being built, else zero.
    [[nodiscard]] Hash32 blockhash(std::uint64_t n) const;
    [[nodiscard]] Word total_supply() const;

    [[nodiscard]] const Account* account(const Address& a) const;
    [[nodiscard]] const std::map<Address, Account>& accounts() const { return accounts_; }
    [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
    [[nodiscard]] const std::vector<Transaction>& pending() const { return pending_; }
    //! External transactions in execution order.
    [[nodiscard]] const std::vector<Transaction>& transactions() const { return executed_; }
    [[nodiscard]] const Transaction* transaction(const Hash32& h) const;
    [[nodiscard]] const Receipt* receipt(const Hash32& h) const;
    [[nodiscard]] const VmTrace* trace(const Hash32& h) const;
    [[nodiscard]] const std::map<Address, ContractRecord>& contracts() const { return contracts_; }
    //! Balances that changed in each block (block 0 lists every genesis account).
    [[nodiscard]] const std::vector<std::map<Address, Word>>& balance_deltas() const { return balance_deltas_; }
    [[nodiscard]] const ChainConfig& config() const { return config_; }

    static Address create_address(const Address& creator, std::uint64_t nonce);

  private:
    WorldState() = default;

    Receipt execute(Transaction& tx, std::uint64_t number, std::uint64_t timestamp, VmTrace& trace);
    Hash32 blockhash_at(std::uint64_t current, std::uint64_t n) const;

    ChainConfig config_;
    std::map<Address, Account> accounts_;
    std::vector<Block> blocks_;
    std::vector<Transaction> pending_;
    std::vector<Transaction> executed_;
    std::map<Hash32, std::size_t> tx_index_;
    std::map<Hash32, Receipt> receipts_;
    std::map<Hash32, VmTrace> traces_;
    std::map<Address, ContractRecord> contracts_;
    std::vector<std::map<Address, Word>> balance_deltas_;
    std::map<Address, Word> last_balances_;
    std::uint64_t tx_nonce_{0};
};

}  // namespace replaylab::chain
