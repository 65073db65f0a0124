// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace replaylab {

//! 256-bit unsigned machine word. Arithmetic on Word wraps; checked helpers
//! below report overflow instead.
using Word = boost::multiprecision::uint256_t;

class HexError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Address {
    std::array<std::uint8_t, 20> bytes{};

    static Address from_hex(std::string_view hex);
    static Address from_word(const Word& w);  // low 160 bits
    [[nodiscard]] Word to_word() const;
    [[nodiscard]] std::string hex() const;  // 0x + 40 lowercase digits
    [[nodiscard]] bool is_zero() const;

    friend auto operator<=>(const Address&, const Address&) = default;
};

struct Hash32 {
    std::array<std::uint8_t, 32> bytes{};

    static Hash32 from_hex(std::string_view hex);
    static Hash32 from_word(const Word& w);
    [[nodiscard]] Word to_word() const;
    [[nodiscard]] std::string hex() const;
    [[nodiscard]] bool is_zero() const;

    friend auto operator<=>(const Hash32&, const Hash32&) = default;
};

// Word helpers.
Word word_from_string(std::string_view text);  // decimal or 0x-hex
std::string word_to_dec(const Word& w);
std::string word_to_hex(const Word& w);  // minimal rendering, "0x0" for zero
//! Number of hex digits in the minimal rendering (0 for zero).
unsigned hex_digits(const Word& w);
Word word_mask(unsigned bits);  // (1 << bits) - 1, bits <= 256

std::optional<Word> checked_add(const Word& a, const Word& b);
std::optional<Word> checked_sub(const Word& a, const Word& b);
std::optional<Word> checked_mul(const Word& a, const Word& b);
Word shift_left(const Word& a, const Word& bits);  // truncating
Word shift_right(const Word& a, const Word& bits);

//! SHA-256 over a byte string built with DigestBuilder.
class DigestBuilder {
  public:
    DigestBuilder& add(std::string_view s);
    DigestBuilder& add(std::uint64_t v);
    DigestBuilder& add(const Word& w);
    DigestBuilder& add(const Address& a);
    DigestBuilder& add(const Hash32& h);
    [[nodiscard]] Hash32 finish() const;

  private:
    std::vector<std::uint8_t> buf_;
};

//! Deterministic account address derived from (label, index).
Address derive_address(std::string_view label, std::uint64_t index);

}  // namespace replaylab
