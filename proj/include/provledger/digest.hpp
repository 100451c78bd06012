#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace provledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// 32-byte SHA-256 output. Roots, leaf hashes, sibling hashes and map
// keys/values all share this representation.
struct Digest {
    static constexpr std::size_t kSize = 32;

    std::array<std::uint8_t, kSize> bytes{};

    // Bit d of the digest, MSB-first across bytes. d must be < 256.
    [[nodiscard]] constexpr bool bit(std::size_t d) const {
        return (bytes[d >> 3] >> (7 - (d & 7))) & 1U;
    }

    [[nodiscard]] std::string hex() const;
    // Throws DecodeError unless `hex` is exactly 64 hex characters.
    static Digest from_hex(std::string_view hex);

    friend constexpr auto operator<=>(const Digest&, const Digest&) = default;
};

using Key = Digest;
using Value = Digest;

// Marker hash for an empty subtree.
inline constexpr Digest kEmpty{};

// Counts hash invocations made on behalf of one operation.
struct HashCounter {
    std::uint64_t calls = 0;
};

Digest sha256(ByteView data);
Digest sha256(std::string_view data);

// H(0x00 || key || value)
Digest leaf_hash(const Key& key, const Value& value, HashCounter* counter = nullptr);
// H(0x01 || left || right)
Digest internal_hash(const Digest& left, const Digest& right, HashCounter* counter = nullptr);

// Maps a user-facing name (URL, path, ...) onto a 256-bit trie path.
Key digest_key(std::string_view name);

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

std::size_t common_prefix_length(const Digest& a, const Digest& b);

}  // namespace provledger
