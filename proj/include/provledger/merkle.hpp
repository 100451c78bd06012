#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "provledger/digest.hpp"

namespace provledger {

inline constexpr std::size_t kMaxDepth = 256;

// Key -> Value. Ordered by key, which is also MSB-first bit order, so a
// contiguous key range is exactly one trie subtree.
using VerifiableMap = std::map<Key, Value>;

class Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable trie node with its hash cached at construction.
class Node {
public:
    struct Leaf {
        Key key;
        Value value;
    };
    struct Internal {
        NodePtr left;
        NodePtr right;
    };
    // Pruned subtree; only its hash is known. A stub hashed kEmpty stands
    // for a subtree with no keys at all.
    struct Stub {};

    static NodePtr leaf(const Key& key, const Value& value, HashCounter* counter = nullptr);
    static NodePtr internal(NodePtr left, NodePtr right, HashCounter* counter = nullptr);
    static NodePtr stub(const Digest& hash);

    [[nodiscard]] const Digest& hash() const { return hash_; }

    [[nodiscard]] bool is_leaf() const { return std::holds_alternative<Leaf>(body_); }
    [[nodiscard]] bool is_internal() const { return std::holds_alternative<Internal>(body_); }
    [[nodiscard]] bool is_stub() const { return std::holds_alternative<Stub>(body_); }

    [[nodiscard]] const Leaf& as_leaf() const { return std::get<Leaf>(body_); }
    [[nodiscard]] const Internal& as_internal() const { return std::get<Internal>(body_); }

private:
    Node(Digest hash, std::variant<Leaf, Internal, Stub> body)
        : hash_(hash), body_(std::move(body)) {}

    Digest hash_;
    std::variant<Leaf, Internal, Stub> body_;
};

// Sibling hashes ordered root-to-leaf: siblings[d] is the hash of the
// sibling of the path node entered at depth d+1. Length equals leaf depth.
struct Proof {
    std::vector<Digest> siblings;

    [[nodiscard]] std::size_t size() const { return siblings.size(); }
    friend bool operator==(const Proof&, const Proof&) = default;
};

// Builds the unique trie for `map`: each key's leaf sits one level below
// its longest common prefix with any other key. Throws EmptyMapError.
NodePtr build_tree(const VerifiableMap& map);

// Throws KeyNotFoundError if the key is absent, PrunedPathError if its
// path enters a (non-empty) stub.
Proof get_proof(const NodePtr& tree, const Key& key);

bool verify_proof(const Digest& root, const Key& key, const Value& value, const Proof& proof);

// Structural equality: same shape, same leaf contents, same stub hashes.
bool structurally_equal(const NodePtr& a, const NodePtr& b);

}  // namespace provledger
