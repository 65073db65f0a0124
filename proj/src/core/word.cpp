// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <replaylab/core/word.hpp>

#include <openssl/sha.h>

namespace replaylab {

namespace {

    int hex_value(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    std::string_view strip_0x(std::string_view hex) {
        if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
        return hex;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> parse_fixed(std::string_view hex) {
        const auto digits = strip_0x(hex);
        if (digits.size() != 2 * N) {
            throw HexError("expected " + std::to_string(2 * N) + " hex digits, got '" + std::string(hex) + "'");
        }
        std::array<std::uint8_t, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            const int hi = hex_value(digits[2 * i]);
            const int lo = hex_value(digits[2 * i + 1]);
            if (hi < 0 || lo < 0) throw HexError("invalid hex digit in '" + std::string(hex) + "'");
            out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
        }
        return out;
    }

    template <std::size_t N>
    std::string render_fixed(const std::array<std::uint8_t, N>& bytes) {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out = "0x";
        out.reserve(2 + 2 * N);
        for (auto b : bytes) {
            out.push_back(kDigits[b >> 4]);
            out.push_back(kDigits[b & 0xf]);
        }
        return out;
    }

    template <std::size_t N>
    Word bytes_to_word(const std::array<std::uint8_t, N>& bytes) {
        Word w = 0;
        for (auto b : bytes) w = (w << 8) | b;
        return w;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> word_to_bytes(Word w) {
        std::array<std::uint8_t, N> out{};
        for (std::size_t i = N; i-- > 0;) {
            out[i] = static_cast<std::uint8_t>(static_cast<unsigned>(w & 0xff));
            w >>= 8;
        }
        return out;
    }

}  // namespace

Address Address::from_hex(std::string_view hex) { return Address{parse_fixed<20>(hex)}; }
Address Address::from_word(const Word& w) { return Address{word_to_bytes<20>(w & word_mask(160))}; }
Word Address::to_word() const { return bytes_to_word(bytes); }
std::string Address::hex() const { return render_fixed(bytes); }
bool Address::is_zero() const { return *this == Address{}; }

Hash32 Hash32::from_hex(std::string_view hex) { return Hash32{parse_fixed<32>(hex)}; }
Hash32 Hash32::from_word(const Word& w) { return Hash32{word_to_bytes<32>(w)}; }
Word Hash32::to_word() const { return bytes_to_word(bytes); }
std::string Hash32::hex() const { return render_fixed(bytes); }
bool Hash32::is_zero() const { return *this == Hash32{}; }

Word word_from_string(std::string_view text) {
    if (text.empty()) throw HexError("empty integer literal");
    Word w = 0;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        const auto digits = strip_0x(text);
        if (digits.size() > 64) throw HexError("hex literal exceeds 256 bits: " + std::string(text));
        for (char c : digits) {
            const int v = hex_value(c);
            if (v < 0) throw HexError("invalid hex literal: " + std::string(text));
            w = (w << 4) | static_cast<unsigned>(v);
        }
        return w;
    }
    const Word max = ~Word{0};
    for (char c : text) {
        if (c < '0' || c > '9') throw HexError("invalid decimal literal: " + std::string(text));
        const auto d = static_cast<unsigned>(c - '0');
        if (w > (max - d) / 10) throw HexError("decimal literal exceeds 256 bits: " + std::string(text));
        w = w * 10 + d;
    }
    return w;
}

std::string word_to_dec(const Word& w) { return w.str(); }

std::string word_to_hex(const Word& w) {
    if (w == 0) return "0x0";
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string rev;
    Word v = w;
    while (v != 0) {
        rev.push_back(kDigits[static_cast<unsigned>(v & 0xf)]);
        v >>= 4;
    }
    return "0x" + std::string(rev.rbegin(), rev.rend());
}

unsigned hex_digits(const Word& w) {
    if (w == 0) return 0;
    return static_cast<unsigned>(boost::multiprecision::msb(w)) / 4 + 1;
}

Word word_mask(unsigned bits) {
    if (bits >= 256) return ~Word{0};
    return (Word{1} << bits) - 1;
}

std::optional<Word> checked_add(const Word& a, const Word& b) {
    Word r = a + b;
    if (r < a) return std::nullopt;
    return r;
}

std::optional<Word> checked_sub(const Word& a, const Word& b) {
    if (a < b) return std::nullopt;
    return a - b;
}

std::optional<Word> checked_mul(const Word& a, const Word& b) {
    if (a == 0 || b == 0) return Word{0};
    Word r = a * b;
    if (r / a != b) return std::nullopt;
    return r;
}

Word shift_left(const Word& a, const Word& bits) {
    if (bits >= 256) return 0;
    return a << static_cast<unsigned>(bits);
}

Word shift_right(const Word& a, const Word& bits) {
    if (bits >= 256) return 0;
    return a >> static_cast<unsigned>(bits);
}

DigestBuilder& DigestBuilder::add(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
}

DigestBuilder& DigestBuilder::add(std::uint64_t v) {
    for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

DigestBuilder& DigestBuilder::add(const Word& w) {
    const auto bytes = word_to_bytes<32>(w);
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    return *this;
}

DigestBuilder& DigestBuilder::add(const Address& a) {
    buf_.insert(buf_.end(), a.bytes.begin(), a.bytes.end());
    return *this;
}

DigestBuilder& DigestBuilder::add(const Hash32& h) {
    buf_.insert(buf_.end(), h.bytes.begin(), h.bytes.end());
    return *this;
}

Hash32 DigestBuilder::finish() const {
    Hash32 out;
    SHA256(buf_.data(), buf_.size(), out.bytes.data());
    return out;
}

Address derive_address(std::string_view label, std::uint64_t index) {
    const Hash32 h = DigestBuilder{}.add(label).add(index).finish();
    Address a;
    std::copy(h.bytes.begin() + 12, h.bytes.end(), a.bytes.begin());
    return a;
}

}  // namespace replaylab
