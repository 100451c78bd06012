#include "provledger/merkle.hpp"

#include <algorithm>
#include <span>

#include "provledger/errors.hpp"

namespace provledger {

NodePtr Node::leaf(const Key& key, const Value& value, HashCounter* counter) {
    return NodePtr(new Node(leaf_hash(key, value, counter), Leaf{key, value}));
}

NodePtr Node::internal(NodePtr left, NodePtr right, HashCounter* counter) {
    const Digest h = internal_hash(left->hash(), right->hash(), counter);
    return NodePtr(new Node(h, Internal{std::move(left), std::move(right)}));
}

NodePtr Node::stub(const Digest& hash) { return NodePtr(new Node(hash, Stub{})); }

namespace {

using Pair = std::pair<const Key, Value>;

NodePtr build_range(std::span<const Pair* const> items, std::size_t depth) {
    if (items.size() == 1) {
        return Node::leaf(items.front()->first, items.front()->second);
    }
    // Sorted keys: everything with bit `depth` clear precedes the rest.
    const auto mid = std::partition_point(items.begin(), items.end(),
                                          [depth](const Pair* p) { return !p->first.bit(depth); });
    const auto split = static_cast<std::size_t>(mid - items.begin());
    NodePtr left = split == 0 ? Node::stub(kEmpty) : build_range(items.first(split), depth + 1);
    NodePtr right = split == items.size() ? Node::stub(kEmpty)
                                          : build_range(items.subspan(split), depth + 1);
    return Node::internal(std::move(left), std::move(right));
}

}  // namespace

NodePtr build_tree(const VerifiableMap& map) {
    if (map.empty()) {
        throw EmptyMapError();
    }
    std::vector<const Pair*> items;
    items.reserve(map.size());
    for (const auto& kv : map) {
        items.push_back(&kv);
    }
    return build_range(items, 0);
}

Proof get_proof(const NodePtr& tree, const Key& key) {
    Proof proof;
    const Node* node = tree.get();
    std::size_t depth = 0;
    while (node->is_internal()) {
        const auto& in = node->as_internal();
        if (key.bit(depth)) {
            proof.siblings.push_back(in.left->hash());
            node = in.right.get();
        } else {
            proof.siblings.push_back(in.right->hash());
            node = in.left.get();
        }
        ++depth;
    }
    if (node->is_stub()) {
        if (node->hash() == kEmpty) {
            throw KeyNotFoundError("key " + key.hex() + " not in tree");
        }
        throw PrunedPathError("path to key " + key.hex() + " is pruned at depth " +
                              std::to_string(depth));
    }
    if (node->as_leaf().key != key) {
        throw KeyNotFoundError("key " + key.hex() + " not in tree");
    }
    return proof;
}

bool verify_proof(const Digest& root, const Key& key, const Value& value, const Proof& proof) {
    if (proof.size() > kMaxDepth) {
        return false;
    }
    Digest h = leaf_hash(key, value);
    for (std::size_t d = proof.size(); d-- > 0;) {
        h = key.bit(d) ? internal_hash(proof.siblings[d], h) : internal_hash(h, proof.siblings[d]);
    }
    return h == root;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a->hash() != b->hash()) {
        return false;
    }
    if (a->is_leaf() && b->is_leaf()) {
        return a->as_leaf().key == b->as_leaf().key && a->as_leaf().value == b->as_leaf().value;
    }
    if (a->is_internal() && b->is_internal()) {
        return structurally_equal(a->as_internal().left, b->as_internal().left) &&
               structurally_equal(a->as_internal().right, b->as_internal().right);
    }
    return a->is_stub() && b->is_stub();
}

}  // namespace provledger
