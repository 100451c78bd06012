#pragma once

// Reference computations for tests. Nothing here calls the library's tree,
// proof or hashing code; only the Digest/Entry value types are shared.

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "provledger/compose.hpp"
#include "provledger/digest.hpp"
#include "provledger/merkle.hpp"

namespace oracle {

using provledger::Digest;
using provledger::Key;
using provledger::Value;

struct Tree {
    Digest root;
    std::map<Key, std::size_t> depth;
    std::map<Key, std::vector<Digest>> proof;  // root-to-leaf siblings
};

// Brute-force builder: recursively partitions an unordered key set by bit.
Tree build(const std::vector<std::pair<Key, Value>>& items);
Tree build(const provledger::VerifiableMap& map);

// 1 + max common prefix with any other key; 0 for a lone key.
std::size_t leaf_depth(const Key& key, const std::vector<Key>& all);

// Distinct sibling positions of the subset's leaf paths that are not
// themselves on any of those paths: the stubs a pruned tree must carry.
std::size_t boundary_sibling_count(const std::vector<Key>& subset, const Tree& full);

// Reference SHA-256 of a single buffer (libsodium one-shot).
Digest sha256_bytes(const std::string& data);

Digest random_digest(std::mt19937_64& rng);
provledger::VerifiableMap random_map(std::mt19937_64& rng, std::size_t n);
std::vector<Key> random_subset(std::mt19937_64& rng, const provledger::VerifiableMap& map,
                               std::size_t m);

}  // namespace oracle
