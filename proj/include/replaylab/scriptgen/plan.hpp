// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <replaylab/explorer/bundle.hpp>

namespace replaylab::scriptgen {

using chain::Json;

class ScriptgenError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kZeroRef = 0;
inline constexpr std::size_t kOneRef = 1;
inline constexpr std::size_t kContractRef = 2;
inline constexpr std::size_t kReservedEntries = 3;
inline constexpr std::size_t kDefaultAddressCap = 1000;

//! Replay-side address of map entry `ref`. The contract placeholder has none until deployment.
Address replay_pool_address(std::size_t ref);
//! Sender used to force a replayed transaction to fail; never has an account.
Address illegal_sender(std::size_t tx_index);

//! Ordered translation table from historic addresses to replay entries. Entry 0 is the zero
//! address, entry 1 the one address, entry 2 the contract under test.
class AddressMap {
  public:
    AddressMap() = default;
    explicit AddressMap(const Address& contract);

    [[nodiscard]] std::optional<std::size_t> find(const Address& historic) const;
    //! Ref of `historic`, appending it when new.
    std::size_t add(const Address& historic);
    //! Appends a contract that the contract under test created with account nonce `nonce`; its
    //! replay address is derived from the deployed address the same way.
    std::size_t add_created(const Address& historic, std::uint64_t nonce);
    [[nodiscard]] std::optional<std::uint64_t> creation_nonce(std::size_t ref) const;
    [[nodiscard]] const std::map<std::size_t, std::uint64_t>& created() const { return created_; }
    [[nodiscard]] const Address& historic(std::size_t ref) const { return entries_.at(ref); }
    //! Replay address of `ref`; `deployed` resolves the contract placeholder.
    [[nodiscard]] Address replay(std::size_t ref, const Address& deployed) const;
    //! Inverse lookup on the replay side.
    [[nodiscard]] std::optional<std::size_t> find_replay(const Address& replay, const Address& deployed) const;
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] const std::vector<Address>& entries() const { return entries_; }

    friend bool operator==(const AddressMap&, const AddressMap&) = default;

  private:
    std::vector<Address> entries_;
    std::map<Address, std::size_t> index_;
    std::map<std::size_t, std::uint64_t> created_;
};

struct AddressMapResult {
    AddressMap map;
    bool truncated{false};
    //! Length of the transaction prefix whose addresses fit under the cap.
    std::size_t kept_transactions{0};
};

AddressMapResult build_address_map(const explorer::HistoricBundle& bundle, const std::vector<Address>& discovered,
                                   std::size_t cap = kDefaultAddressCap);

struct Embed {
    std::size_t ref{0};
    unsigned shift{0};

    friend bool operator==(const Embed&, const Embed&) = default;
};

//! A word in translated form: ref (whole value is an address entry), or residual bits with
//! address entries OR-ed in at fixed shifts.
struct PlanWord {
    std::optional<std::size_t> ref;
    Word residual{0};
    std::vector<Embed> embeds;

    friend bool operator==(const PlanWord&, const PlanWord&) = default;
};

struct PlanArg {
    mcl::Type type{mcl::Type::kUint};
    PlanWord word;
    std::vector<PlanWord> items;  // arrays

    friend bool operator==(const PlanArg&, const PlanArg&) = default;
};

struct ExpectedParam {
    std::string name;
    mcl::Type type{mcl::Type::kUint};
    PlanWord value;

    friend bool operator==(const ExpectedParam&, const ExpectedParam&) = default;
};

struct ExpectedEvent {
    std::string name;
    std::vector<ExpectedParam> params;

    friend bool operator==(const ExpectedEvent&, const ExpectedEvent&) = default;
};

struct DeployStep {
    std::size_t from{0};
    std::vector<PlanArg> args;
    Word value{0};
    std::uint64_t timestamp{0};
    std::uint64_t gas_limit{0};

    friend bool operator==(const DeployStep&, const DeployStep&) = default;
};

struct TxStep {
    std::size_t index{0};
    Hash32 historic_hash;
    std::string method;
    std::vector<PlanArg> args;
    std::size_t from{0};  // historic sender's entry
    std::size_t to{kContractRef};
    Word value{0};
    std::uint64_t gas_limit{0};
    std::uint64_t timestamp{0};
    bool force_fail{false};
    Address illegal_from;  // used instead of `from` when force_fail
    chain::Status expected_status{chain::Status::kSuccess};
    std::vector<ExpectedEvent> expected_events;
    std::vector<std::size_t> balance_queries;

    friend bool operator==(const TxStep&, const TxStep&) = default;
};

struct GetterProbe {
    std::string method;
    std::vector<PlanArg> args;

    friend bool operator==(const GetterProbe&, const GetterProbe&) = default;
};

//! Replay script. Rendered as an ordered step list: the deploy step, one tx step per historic
//! transaction, then the getter probes.
struct TestPlan {
    std::string contract_name;
    Address historic_contract;
    std::string source;  // historic source text; literals are translated at deployment
    std::uint64_t seed{0};
    bool truncated{false};
    std::size_t requested_T{0};
    AddressMap address_map;
    DeployStep deploy;
    std::vector<TxStep> txs;
    std::vector<GetterProbe> getters;

    [[nodiscard]] std::size_t T() const { return txs.size(); }
    [[nodiscard]] std::string source_path() const { return "contracts/" + contract_name + ".mcl"; }

    friend bool operator==(const TestPlan&, const TestPlan&) = default;
};

struct GenerateOptions {
    std::uint64_t seed{0};
    //! Accept bundles marked partial.
    bool allow_partial{false};
};

TestPlan generate_plan(const explorer::HistoricBundle& bundle, const AddressMapResult& map, const GenerateOptions& options);

//! Translates a historic word: whole-address refs for address-typed values, else embedded
//! entries at shifts 0..96.
PlanWord translate_word(const AddressMap& map, mcl::Type type, const Word& w);
Word resolve_word(const AddressMap& map, const PlanWord& w, const Address& deployed);
//! Inverse of resolve_word on the historic side.
Word historic_word(const AddressMap& map, const PlanWord& w);
chain::Value resolve_arg(const AddressMap& map, const PlanArg& a, const Address& deployed);

//! Argument for parameter `index` of getter `method`. Counter-based: depends only on
//! (seed, method, index), so probes do not shift when getters are added.
PlanArg getter_argument(std::uint64_t seed, const std::string& method, std::size_t index, mcl::Type type,
                        std::size_t map_size);

Json plan_to_json(const TestPlan& plan);
TestPlan plan_from_json(const Json& j, std::string source);
//! Canonical plan file text.
std::string render_plan(const TestPlan& plan);

//! Replay genesis: every non-reserved entry endowed with `endowment`.
Json genesis_config(const TestPlan& plan, const Word& endowment, const Word& gas_price);

//! ustar archive with contracts/<Name>.mcl, test/plan.json and config/genesis.json.
std::string test_box(const TestPlan& plan, const Json& genesis);

}  // namespace replaylab::scriptgen
