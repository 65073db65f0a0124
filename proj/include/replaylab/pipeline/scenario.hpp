// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <replaylab/chain/json.hpp>

namespace replaylab::pipeline {

//! Scenario failures carry the index of the offending step (-1 for header errors).
class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(long step, const std::string& what);
    [[nodiscard]] long step() const { return step_; }

  private:
    long step_;
};

//! Historic externally owned account k of a recorded scenario.
Address historic_eoa(std::uint64_t k);

struct RecordedChain {
    chain::WorldState state;
    //! Deployment aliases ("as" names) to contract addresses.
    std::map<std::string, Address> aliases;
};

// Scenario document:
//   {"name", "accounts": n, "endowment": "dec", "gas_price": "dec", "steps": [...]}
// Steps:
//   {"deploy": Contract, "source": file, "with": [files], "link": {"0x..": alias}, "as": alias,
//    "from": k, "args": [...], "value": "dec", "timestamp": t, "gas_limit": g}
//   {"from": k, "to": alias|address, "method": m, "args": [...], "value": "dec", "timestamp": t,
//    "gas_limit": g, "expect": status, "created_as": {alias: k}}
//   {"mine": t}
// Address arguments: "$k" (historic account k), "@alias", or 0x-hex. uint arguments: decimal or
// hex strings, numbers, or {"address": ref, "shl": n, "mul": m, "add": "dec"}.
// "created_as" names the k-th contract created internally by the step. Every step is mined in
// its own block.
RecordedChain record_scenario(const chain::Json& scenario, const std::filesystem::path& source_dir);
RecordedChain record_scenario_file(const std::filesystem::path& scenario_file, const std::filesystem::path& source_dir);

}  // namespace replaylab::pipeline
