#include "provledger/digest.hpp"

#include <sodium.h>

#include <bit>
#include <stdexcept>

#include "provledger/errors.hpp"

namespace provledger {
namespace {

struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    }
};

const SodiumInit kSodium;

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string Digest::hex() const { return to_hex(bytes); }

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 2 * kSize) {
        throw DecodeError("digest hex must be 64 characters, got " + std::to_string(hex.size()));
    }
    const Bytes raw = provledger::from_hex(hex);
    Digest d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

Digest sha256(ByteView data) {
    Digest out;
    crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
    return out;
}

Digest sha256(std::string_view data) {
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest leaf_hash(const Key& key, const Value& value, HashCounter* counter) {
    static constexpr std::uint8_t kPrefix = 0x00;
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, &kPrefix, 1);
    crypto_hash_sha256_update(&st, key.bytes.data(), Digest::kSize);
    crypto_hash_sha256_update(&st, value.bytes.data(), Digest::kSize);
    Digest out;
    crypto_hash_sha256_final(&st, out.bytes.data());
    if (counter) ++counter->calls;
    return out;
}

Digest internal_hash(const Digest& left, const Digest& right, HashCounter* counter) {
    static constexpr std::uint8_t kPrefix = 0x01;
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, &kPrefix, 1);
    crypto_hash_sha256_update(&st, left.bytes.data(), Digest::kSize);
    crypto_hash_sha256_update(&st, right.bytes.data(), Digest::kSize);
    Digest out;
    crypto_hash_sha256_final(&st, out.bytes.data());
    if (counter) ++counter->calls;
    return out;
}

Key digest_key(std::string_view name) { return sha256(name); }

std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw DecodeError("odd-length hex string");
    }
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_nibble(hex[2 * i]);
        const int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw DecodeError("invalid hex character");
        }
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::size_t common_prefix_length(const Digest& a, const Digest& b) {
    for (std::size_t i = 0; i < Digest::kSize; ++i) {
        const std::uint8_t x = a.bytes[i] ^ b.bytes[i];
        if (x != 0) {
            return i * 8 + static_cast<std::size_t>(std::countl_zero(x));
        }
    }
    return 8 * Digest::kSize;
}

}  // namespace provledger
