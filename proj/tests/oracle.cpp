#include "oracle.hpp"

#include <sodium.h>

#include <algorithm>
#include <set>

namespace oracle {
namespace {

int bit_at(const Key& k, std::size_t d) {
    const int byte = k.bytes[d / 8];
    return (byte >> (7 - static_cast<int>(d % 8))) & 1;
}

Digest hash_with_prefix(unsigned char prefix, const Digest& a, const Digest& b) {
    std::string buf(1, static_cast<char>(prefix));
    buf.append(reinterpret_cast<const char*>(a.bytes.data()), 32);
    buf.append(reinterpret_cast<const char*>(b.bytes.data()), 32);
    return sha256_bytes(buf);
}

Digest build_rec(const std::vector<std::pair<Key, Value>>& items, std::size_t depth, Tree& out) {
    if (items.empty()) {
        return Digest{};
    }
    if (items.size() == 1) {
        out.depth[items[0].first] = depth;
        return hash_with_prefix(0x00, items[0].first, items[0].second);
    }
    std::vector<std::pair<Key, Value>> zeros;
    std::vector<std::pair<Key, Value>> ones;
    for (const auto& it : items) {
        (bit_at(it.first, depth) == 0 ? zeros : ones).push_back(it);
    }
    const Digest left = build_rec(zeros, depth + 1, out);
    const Digest right = build_rec(ones, depth + 1, out);
    for (const auto& it : zeros) {
        auto& p = out.proof[it.first];
        if (p.size() <= depth) p.resize(depth + 1);
        p[depth] = right;
    }
    for (const auto& it : ones) {
        auto& p = out.proof[it.first];
        if (p.size() <= depth) p.resize(depth + 1);
        p[depth] = left;
    }
    return hash_with_prefix(0x01, left, right);
}

std::string prefix_string(const Key& k, std::size_t len) {
    std::string s;
    for (std::size_t d = 0; d < len; ++d) {
        s.push_back(bit_at(k, d) ? '1' : '0');
    }
    return s;
}

}  // namespace

Digest sha256_bytes(const std::string& data) {
    Digest out;
    crypto_hash_sha256(out.bytes.data(), reinterpret_cast<const unsigned char*>(data.data()),
                       data.size());
    return out;
}

Tree build(const std::vector<std::pair<Key, Value>>& items) {
    Tree t;
    for (const auto& it : items) {
        t.proof[it.first];  // lone root leaf keeps an empty proof
    }
    t.root = build_rec(items, 0, t);
    return t;
}

Tree build(const provledger::VerifiableMap& map) {
    std::vector<std::pair<Key, Value>> items(map.begin(), map.end());
    // Reverse so the oracle never benefits from sorted input.
    std::reverse(items.begin(), items.end());
    return build(items);
}

std::size_t leaf_depth(const Key& key, const std::vector<Key>& all) {
    std::size_t best = 0;
    bool other = false;
    for (const Key& k : all) {
        if (k == key) continue;
        other = true;
        std::size_t lcp = 0;
        while (lcp < 256 && bit_at(k, lcp) == bit_at(key, lcp)) ++lcp;
        best = std::max(best, lcp);
    }
    return other ? best + 1 : 0;
}

std::size_t boundary_sibling_count(const std::vector<Key>& subset, const Tree& full) {
    std::set<std::string> on_path;
    for (const Key& k : subset) {
        const std::size_t depth = full.depth.at(k);
        for (std::size_t len = 0; len <= depth; ++len) {
            on_path.insert(prefix_string(k, len));
        }
    }
    std::set<std::string> siblings;
    for (const std::string& p : on_path) {
        if (p.empty()) continue;
        std::string s = p;
        s.back() = s.back() == '0' ? '1' : '0';
        if (!on_path.contains(s)) siblings.insert(s);
    }
    return siblings.size();
}

Digest random_digest(std::mt19937_64& rng) {
    Digest d;
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : d.bytes) b = static_cast<std::uint8_t>(byte(rng));
    return d;
}

provledger::VerifiableMap random_map(std::mt19937_64& rng, std::size_t n) {
    provledger::VerifiableMap m;
    while (m.size() < n) {
        m.emplace(random_digest(rng), random_digest(rng));
    }
    return m;
}

std::vector<Key> random_subset(std::mt19937_64& rng, const provledger::VerifiableMap& map,
                               std::size_t m) {
    std::vector<Key> keys;
    for (const auto& kv : map) keys.push_back(kv.first);
    std::shuffle(keys.begin(), keys.end(), rng);
    keys.resize(m);
    return keys;
}

}  // namespace oracle
