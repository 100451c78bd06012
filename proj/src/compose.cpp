#include "provledger/compose.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "provledger/errors.hpp"

namespace provledger {
namespace {

void collect_entries(const NodePtr& node, std::vector<Digest>& path, std::vector<Entry>& out) {
    if (node->is_leaf()) {
        const auto& leaf = node->as_leaf();
        out.push_back(Entry{leaf.key, leaf.value, Proof{path}});
        return;
    }
    if (node->is_stub()) {
        return;
    }
    const auto& in = node->as_internal();
    path.push_back(in.right->hash());
    collect_entries(in.left, path, out);
    path.back() = in.left->hash();
    collect_entries(in.right, path, out);
    path.pop_back();
}

class Merger {
public:
    NodePtr merge(std::span<const Entry* const> items, std::size_t depth) {
        if (items.size() == 1 && items.front()->proof.size() == depth) {
            return Node::leaf(items.front()->key, items.front()->value, &counter_);
        }
        if (depth >= kMaxDepth) {
            throw MalformedProofError("proof of key " + items.front()->key.hex() +
                                      " is longer than the key");
        }
        for (const Entry* e : items) {
            if (e->proof.size() <= depth) {
                // The entry says its leaf sits here, yet another key shares the position.
                throw ConflictError("entry for key " + e->key.hex() + " ends at depth " +
                                    std::to_string(e->proof.size()) +
                                    " but other entries continue below it");
            }
        }

        const auto mid = std::partition_point(items.begin(), items.end(),
                                              [depth](const Entry* e) { return !e->key.bit(depth); });
        const auto split = static_cast<std::size_t>(mid - items.begin());
        const auto zeros = items.first(split);
        const auto ones = items.subspan(split);

        NodePtr left = zeros.empty() ? Node::stub(ones.front()->proof.siblings[depth])
                                     : merge(zeros, depth + 1);
        NodePtr right = ones.empty() ? Node::stub(zeros.front()->proof.siblings[depth])
                                     : merge(ones, depth + 1);

        // Each entry names its sibling's hash at this depth; all must agree
        // with what was computed or stubbed for that side.
        check_siblings(zeros, depth, right->hash());
        check_siblings(ones, depth, left->hash());

        return Node::internal(std::move(left), std::move(right), &counter_);
    }

    [[nodiscard]] std::uint64_t hash_calls() const { return counter_.calls; }

private:
    static void check_siblings(std::span<const Entry* const> side, std::size_t depth,
                               const Digest& expected) {
        for (const Entry* e : side) {
            if (e->proof.siblings[depth] != expected) {
                throw ConflictError("entry for key " + e->key.hex() + " disagrees at depth " +
                                    std::to_string(depth) + ": sibling " +
                                    e->proof.siblings[depth].hex() + " vs " + expected.hex());
            }
        }
    }

    HashCounter counter_;
};

void encode_node(const NodePtr& node, Bytes& out) {
    if (node->is_leaf()) {
        const auto& leaf = node->as_leaf();
        out.push_back(tag::kLeaf);
        out.insert(out.end(), leaf.key.bytes.begin(), leaf.key.bytes.end());
        out.insert(out.end(), leaf.value.bytes.begin(), leaf.value.bytes.end());
    } else if (node->is_internal()) {
        out.push_back(tag::kInternal);
        encode_node(node->as_internal().left, out);
        encode_node(node->as_internal().right, out);
    } else {
        out.push_back(tag::kStub);
        out.insert(out.end(), node->hash().bytes.begin(), node->hash().bytes.end());
    }
}

class Decoder {
public:
    explicit Decoder(ByteView bytes) : bytes_(bytes) {}

    DerivativeTree run() {
        NodePtr root = node(0, Key{});
        if (pos_ != bytes_.size()) {
            throw DecodeError("multiproof has " + std::to_string(bytes_.size() - pos_) +
                              " trailing bytes");
        }
        return DerivativeTree{root, root->hash()};
    }

private:
    // `prefix` holds the path bits taken so far (first `depth` bits valid).
    NodePtr node(std::size_t depth, Key prefix) {
        const std::uint8_t t = take_byte();
        switch (t) {
            case tag::kLeaf: {
                const Key key = take_digest();
                const Value value = take_digest();
                if (common_prefix_length(key, prefix) < depth) {
                    throw DecodeError("leaf " + key.hex() + " is off its key path at depth " +
                                      std::to_string(depth));
                }
                return Node::leaf(key, value);
            }
            case tag::kInternal: {
                if (depth >= kMaxDepth) {
                    throw DecodeError("multiproof nests deeper than 256 levels");
                }
                NodePtr left = node(depth + 1, prefix);
                prefix.bytes[depth >> 3] |= static_cast<std::uint8_t>(0x80U >> (depth & 7));
                NodePtr right = node(depth + 1, prefix);
                return Node::internal(std::move(left), std::move(right));
            }
            case tag::kStub:
                return Node::stub(take_digest());
            default:
                throw DecodeError("unknown multiproof tag " + std::to_string(t) + " at offset " +
                                  std::to_string(pos_ - 1));
        }
    }

    std::uint8_t take_byte() {
        if (pos_ >= bytes_.size()) {
            throw DecodeError("multiproof truncated at offset " + std::to_string(pos_));
        }
        return bytes_[pos_++];
    }

    Digest take_digest() {
        if (bytes_.size() - pos_ < Digest::kSize) {
            throw DecodeError("multiproof truncated at offset " + std::to_string(pos_));
        }
        Digest d;
        std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), Digest::kSize,
                    d.bytes.begin());
        pos_ += Digest::kSize;
        return d;
    }

    ByteView bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<Entry> DerivativeTree::entries() const {
    std::vector<Entry> out;
    std::vector<Digest> path;
    collect_entries(root, path, out);
    return out;
}

std::size_t DerivativeTree::leaf_count() const {
    std::size_t count = 0;
    std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
        if (n->is_leaf()) {
            ++count;
        } else if (n->is_internal()) {
            walk(n->as_internal().left);
            walk(n->as_internal().right);
        }
    };
    walk(root);
    return count;
}

std::vector<Entry> split_tree(const VerifiableMap& map, const NodePtr& tree) {
    std::vector<Entry> out;
    out.reserve(map.size());
    for (const auto& [key, value] : map) {
        out.push_back(Entry{key, value, get_proof(tree, key)});
    }
    return out;
}

DerivativeTree merge_tree(std::span<const Entry> entries, const std::optional<Digest>& expected_root,
                          MergeStats* stats) {
    if (entries.empty()) {
        throw MalformedProofError("merge_tree needs at least one entry");
    }
    std::vector<const Entry*> sorted;
    sorted.reserve(entries.size());
    std::uint64_t proof_hashes = 0;
    for (const Entry& e : entries) {
        sorted.push_back(&e);
        proof_hashes += e.proof.size();
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Entry* a, const Entry* b) { return a->key < b->key; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1]->key == sorted[i]->key) {
            throw DuplicateKeyError("duplicate key " + sorted[i]->key.hex());
        }
    }
    for (const Entry* e : sorted) {
        if (e->proof.size() > kMaxDepth) {
            throw MalformedProofError("proof of key " + e->key.hex() + " has " +
                                      std::to_string(e->proof.size()) + " siblings");
        }
    }

    Merger merger;
    NodePtr root = merger.merge(sorted, 0);
    if (stats) {
        stats->hash_calls = merger.hash_calls();
        stats->proof_hashes = proof_hashes;
        stats->entries = entries.size();
    }
    if (expected_root && root->hash() != *expected_root) {
        throw RootMismatchError("merged root " + root->hash().hex() + " != expected " +
                                expected_root->hex());
    }
    return DerivativeTree{root, root->hash()};
}

std::vector<Entry> resplit(const DerivativeTree& derivative, std::span<const Key> keys) {
    std::vector<Entry> out;
    out.reserve(keys.size());
    for (const Key& key : keys) {
        Proof proof = get_proof(derivative.root, key);
        // get_proof guarantees a leaf with this key at the end of the path.
        const Node* node = derivative.root.get();
        for (std::size_t d = 0; d < proof.size(); ++d) {
            node = key.bit(d) ? node->as_internal().right.get() : node->as_internal().left.get();
        }
        out.push_back(Entry{key, node->as_leaf().value, std::move(proof)});
    }
    return out;
}

Bytes encode_multiproof(const NodePtr& tree) {
    Bytes out;
    encode_node(tree, out);
    return out;
}

Bytes encode_multiproof(const DerivativeTree& derivative) { return encode_multiproof(derivative.root); }

DerivativeTree decode_multiproof(ByteView bytes) { return Decoder(bytes).run(); }

std::size_t naive_entry_list_size(std::span<const Entry> entries) {
    std::size_t total = 0;
    for (const Entry& e : entries) {
        total += 2 * Digest::kSize + Digest::kSize * e.proof.size();
    }
    return total;
}

std::size_t SequenceDelta::payload_size() const {
    std::size_t total = base.size();
    for (const auto& d : deltas) {
        total += 8 + Digest::kSize;
        total += naive_entry_list_size(d.changed);
        total += Digest::kSize * d.removed.size();
    }
    return total;
}

SequenceDelta encode_sequence(std::span<const IndexedTree> trees) {
    if (trees.empty()) {
        throw EmptySequenceError();
    }
    SequenceDelta out;
    out.base_block_index = trees.front().block_index;
    out.base = encode_multiproof(trees.front().tree);

    std::map<Key, Entry> prev;
    for (Entry& e : trees.front().tree.entries()) {
        prev.emplace(e.key, std::move(e));
    }
    for (const IndexedTree& state : trees.subspan(1)) {
        BlockDelta delta;
        delta.block_index = state.block_index;
        delta.new_root = state.tree.root->hash();
        std::map<Key, Entry> cur;
        for (Entry& e : state.tree.entries()) {
            cur.emplace(e.key, std::move(e));
        }
        for (const auto& [key, entry] : cur) {
            const auto it = prev.find(key);
            if (it == prev.end() || !(it->second == entry)) {
                delta.changed.push_back(entry);
            }
        }
        for (const auto& [key, entry] : prev) {
            if (!cur.contains(key)) {
                delta.removed.push_back(key);
            }
        }
        out.deltas.push_back(std::move(delta));
        prev = std::move(cur);
    }
    return out;
}

std::vector<IndexedTree> decode_sequence(const SequenceDelta& delta) {
    std::vector<IndexedTree> out;
    out.push_back(IndexedTree{delta.base_block_index, decode_multiproof(delta.base)});

    std::map<Key, Entry> state;
    for (Entry& e : out.front().tree.entries()) {
        state.emplace(e.key, std::move(e));
    }
    for (const BlockDelta& step : delta.deltas) {
        for (const Key& key : step.removed) {
            state.erase(key);
        }
        for (const Entry& e : step.changed) {
            state.insert_or_assign(e.key, e);
        }
        std::vector<Entry> entries;
        entries.reserve(state.size());
        for (const auto& kv : state) {
            entries.push_back(kv.second);
        }
        // merge_tree raises ConflictError when a stale proof survives into
        // the replayed set; surface both failure kinds as a root mismatch.
        try {
            out.push_back(IndexedTree{step.block_index, merge_tree(entries, step.new_root)});
        } catch (const ConflictError& e) {
            throw RootMismatchError("replay of block " + std::to_string(step.block_index) +
                                    " is inconsistent: " + e.what());
        }
    }
    return out;
}

}  // namespace provledger
