// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <replaylab/chain/types.hpp>

namespace replaylab::chain::gas {

inline constexpr std::uint64_t kIntrinsic = 100;
inline constexpr std::uint64_t kMove = 3;
inline constexpr std::uint64_t kStorageRead = 20;
inline constexpr std::uint64_t kStorageWrite = 100;
inline constexpr std::uint64_t kEmitBase = 50;
inline constexpr std::uint64_t kEmitPerParam = 10;
inline constexpr std::uint64_t kCall = 40;
inline constexpr std::uint64_t kTransfer = 20;
inline constexpr std::uint64_t kCreateBase = 200;
inline constexpr std::uint64_t kCreatePerInstruction = 10;

std::uint64_t instruction_cost(const mcl::Instruction& ins, const mcl::CompiledContract& contract);
std::uint64_t create_cost(const mcl::CompiledContract& code);
//! Cost charged before any instruction runs: the base cost, plus the code deposit for creations.
std::uint64_t intrinsic_cost(const Transaction& tx);

}  // namespace replaylab::chain::gas
