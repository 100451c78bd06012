#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "provledger/digest.hpp"
#include "provledger/merkle.hpp"

namespace provledger {

// Portable proof-carrying unit: verifies on its own against the root of
// the tree it was split from.
struct Entry {
    Key key;
    Value value;
    Proof proof;

    friend bool operator==(const Entry&, const Entry&) = default;
};

// A pruned tree whose stubs stand in for subtrees that were not
// transferred. Its hash still equals the source root.
struct DerivativeTree {
    NodePtr root;
    Digest source_root;

    // All non-stub leaves with their proofs, in key order.
    [[nodiscard]] std::vector<Entry> entries() const;
    [[nodiscard]] std::size_t leaf_count() const;
};

// Instrumentation for merge_tree; counts hash invocations.
struct MergeStats {
    std::uint64_t hash_calls = 0;
    std::uint64_t proof_hashes = 0;  // sum of input proof lengths
    std::uint64_t entries = 0;
};

// One entry per pair of `map`, proofs taken from `tree`.
std::vector<Entry> split_tree(const VerifiableMap& map, const NodePtr& tree);

// Rebuilds the pruned tree spanned by `entries`. Every entry's proof is
// checked against the subtrees computed from the others, so the result
// root is one against which all entries verify.
//
// Throws DuplicateKeyError, ConflictError, MalformedProofError, and
// RootMismatchError (only when `expected_root` is given).
DerivativeTree merge_tree(std::span<const Entry> entries,
                          const std::optional<Digest>& expected_root = std::nullopt,
                          MergeStats* stats = nullptr);

std::vector<Entry> resplit(const DerivativeTree& derivative, std::span<const Key> keys);

// Wire format, pre-order:
//   0x00 key(32) value(32)     leaf
//   0x01 <left> <right>        internal
//   0x02 hash(32)              stub
namespace tag {
inline constexpr std::uint8_t kLeaf = 0x00;
inline constexpr std::uint8_t kInternal = 0x01;
inline constexpr std::uint8_t kStub = 0x02;
}  // namespace tag

Bytes encode_multiproof(const DerivativeTree& derivative);
Bytes encode_multiproof(const NodePtr& tree);
// Throws DecodeError on truncation, trailing bytes, unknown tags, nesting
// beyond 256 levels, or a leaf that does not lie on its own key path.
DerivativeTree decode_multiproof(ByteView bytes);

// Size of the same entries sent as independent records: key, value and
// every sibling hash, with no framing.
std::size_t naive_entry_list_size(std::span<const Entry> entries);

struct IndexedTree {
    std::uint64_t block_index = 0;
    DerivativeTree tree;
};

struct BlockDelta {
    std::uint64_t block_index = 0;
    // Entries whose (key, value, proof) differ from the previous state.
    std::vector<Entry> changed;
    // Keys present in the previous state but not in this one.
    std::vector<Key> removed;
    Digest new_root;
};

struct SequenceDelta {
    std::uint64_t base_block_index = 0;
    Bytes base;  // multiproof of the first state
    std::vector<BlockDelta> deltas;

    // Bytes carried: base plus 64 + 32*|proof| per changed entry, 32 per
    // removed key and 8 + 32 per delta header.
    [[nodiscard]] std::size_t payload_size() const;
};

SequenceDelta encode_sequence(std::span<const IndexedTree> trees);
std::vector<IndexedTree> decode_sequence(const SequenceDelta& delta);

}  // namespace provledger
