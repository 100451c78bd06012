#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "provledger/errors.hpp"
#include "provledger/merkle.hpp"

namespace provledger {
namespace {

Digest filled(std::uint8_t first, std::uint8_t rest = 0x11) {
    Digest d;
    d.bytes.fill(rest);
    d.bytes[0] = first;
    return d;
}

TEST(DigestTest, HexRoundTripIsLowercase) {
    Digest d = filled(0xAB, 0xCD);
    const std::string hex = d.hex();
    EXPECT_EQ(hex.size(), 64u);
    EXPECT_EQ(hex.substr(0, 4), "abcd");
    EXPECT_EQ(Digest::from_hex(hex), d);
    EXPECT_EQ(Digest::from_hex("ABCD" + hex.substr(4)), d);
    EXPECT_THROW(Digest::from_hex(hex.substr(2)), DecodeError);
    EXPECT_THROW(Digest::from_hex("zz" + hex.substr(2)), DecodeError);
}

TEST(DigestTest, BitOrderIsMsbFirst) {
    Digest d;
    d.bytes[0] = 0x80;
    d.bytes[1] = 0x01;
    EXPECT_TRUE(d.bit(0));
    EXPECT_FALSE(d.bit(1));
    EXPECT_TRUE(d.bit(15));
    EXPECT_FALSE(d.bit(8));
}

TEST(DigestKeyTest, EmptyNameIsSha256OfEmptyString) {
    EXPECT_EQ(digest_key("").hex(),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(DigestKeyTest, MatchesReferenceAndIsDeterministic) {
    const std::string url = "https://example.org/";
    const Key k = digest_key(url);
    EXPECT_EQ(k, digest_key(url));
    EXPECT_EQ(k, oracle::sha256_bytes(url));
    EXPECT_EQ(k.bit(0), (k.bytes[0] & 0x80) != 0);
}

TEST(BuildTreeTest, EmptyMapThrows) {
    EXPECT_THROW(build_tree({}), EmptyMapError);
}

TEST(BuildTreeTest, SingleEntryIsLeafAtDepthZero) {
    const Key k = filled(0x12);
    const Value v = filled(0x34);
    const NodePtr t = build_tree({{k, v}});
    ASSERT_TRUE(t->is_leaf());
    EXPECT_EQ(t->hash(), leaf_hash(k, v));
    EXPECT_EQ(t->hash(), oracle::build(VerifiableMap{{k, v}}).root);
    EXPECT_TRUE(get_proof(t, k).siblings.empty());
}

TEST(BuildTreeTest, KeysSplitAtFirstBit) {
    const Key a = filled(0x00);
    const Key b = filled(0x80);
    const Value va = filled(1);
    const Value vb = filled(2);
    const NodePtr t = build_tree({{a, va}, {b, vb}});
    ASSERT_TRUE(t->is_internal());
    EXPECT_EQ(t->hash(), internal_hash(leaf_hash(a, va), leaf_hash(b, vb)));
    EXPECT_EQ(get_proof(t, a).siblings, std::vector<Digest>{leaf_hash(b, vb)});
    EXPECT_EQ(get_proof(t, b).siblings, std::vector<Digest>{leaf_hash(a, va)});
}

TEST(BuildTreeTest, SharedPrefixLeavesEmptySibling) {
    // Both keys start with bit 0; they split at bit 1.
    const Key a = filled(0x00);
    const Key b = filled(0x40);
    const NodePtr t = build_tree({{a, filled(1)}, {b, filled(2)}});
    const Proof p = get_proof(t, a);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p.siblings[0], kEmpty);
    EXPECT_EQ(t->hash(), oracle::build(VerifiableMap{{a, filled(1)}, {b, filled(2)}}).root);
}

TEST(BuildTreeTest, SeededMapMatchesOracle) {
    std::mt19937_64 rng(7);
    const VerifiableMap map = oracle::random_map(rng, 64);
    const NodePtr t = build_tree(map);
    const oracle::Tree ref = oracle::build(map);
    EXPECT_EQ(t->hash(), ref.root);
    for (const auto& [k, v] : map) {
        const Proof p = get_proof(t, k);
        EXPECT_EQ(p.siblings, ref.proof.at(k));
        EXPECT_TRUE(verify_proof(t->hash(), k, v, p));
    }
}

TEST(GetProofTest, AbsentKeyThrows) {
    std::mt19937_64 rng(1);
    const VerifiableMap map = oracle::random_map(rng, 16);
    const NodePtr t = build_tree(map);
    EXPECT_THROW(get_proof(t, oracle::random_digest(rng)), KeyNotFoundError);
    const NodePtr single = build_tree({{filled(1), filled(2)}});
    EXPECT_THROW(get_proof(single, filled(3)), KeyNotFoundError);
}

TEST(GetProofTest, StubOnPathThrowsPruned) {
    const Key a = filled(0x00);
    const Key b = filled(0x80);
    const NodePtr t = Node::internal(Node::leaf(a, filled(1)), Node::stub(filled(9)));
    EXPECT_EQ(get_proof(t, a).size(), 1u);
    EXPECT_THROW(get_proof(t, b), PrunedPathError);
}

TEST(VerifyProofTest, SingleLeafIdentityAndTamper) {
    const Key k = filled(5);
    Value v = filled(6);
    const Digest root = leaf_hash(k, v);
    EXPECT_TRUE(verify_proof(root, k, v, {}));
    v.bytes[17] ^= 0x01;
    EXPECT_FALSE(verify_proof(root, k, v, {}));
}

TEST(VerifyProofTest, RejectsOverlongProof) {
    const Key k = filled(5);
    const Value v = filled(6);
    Proof p;
    p.siblings.assign(257, kEmpty);
    EXPECT_FALSE(verify_proof(kEmpty, k, v, p));
}

TEST(VerifyProofTest, EverySiblingByteFlipFails) {
    std::mt19937_64 rng(11);
    const VerifiableMap map = oracle::random_map(rng, 64);
    const NodePtr t = build_tree(map);
    const Digest root = oracle::build(map).root;
    for (const auto& [k, v] : map) {
        const Proof p = get_proof(t, k);
        ASSERT_TRUE(verify_proof(root, k, v, p));
        for (std::size_t i = 0; i < p.size(); ++i) {
            Proof bad = p;
            bad.siblings[i].bytes[i % 32] ^= 0x80;
            EXPECT_FALSE(verify_proof(root, k, v, bad));
        }
    }
}

// Properties

TEST(MerkleProperties, RootIndependentOfInsertionOrder) {
    std::mt19937_64 rng(3);
    const VerifiableMap base = oracle::random_map(rng, 32);
    std::vector<std::pair<Key, Value>> pairs(base.begin(), base.end());
    const Digest expected = build_tree(base)->hash();
    for (int i = 0; i < 100; ++i) {
        std::shuffle(pairs.begin(), pairs.end(), rng);
        VerifiableMap m;
        for (const auto& kv : pairs) m.insert(kv);
        EXPECT_EQ(build_tree(m)->hash(), expected);
    }
}

TEST(MerkleProperties, CompletenessAndDepthLaw) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const VerifiableMap map = oracle::random_map(rng, n);
        const NodePtr t = build_tree(map);
        std::vector<Key> keys;
        for (const auto& kv : map) keys.push_back(kv.first);
        for (const auto& [k, v] : map) {
            const Proof p = get_proof(t, k);
            EXPECT_TRUE(verify_proof(t->hash(), k, v, p));
            EXPECT_EQ(p.size(), oracle::leaf_depth(k, keys));
        }
    }
}

TEST(MerkleProperties, WrongValueNeverVerifies) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 256;
        const VerifiableMap map = oracle::random_map(rng, n);
        const NodePtr t = build_tree(map);
        auto it = map.begin();
        std::advance(it, static_cast<long>(rng() % n));
        Value other = it->second;
        other.bytes[rng() % 32] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        EXPECT_FALSE(verify_proof(t->hash(), it->first, other, get_proof(t, it->first)));
    }
}

TEST(MerkleProperties, AnyValueChangeMovesRoot) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 256;
        VerifiableMap map = oracle::random_map(rng, n);
        const Digest before = build_tree(map)->hash();
        auto it = map.begin();
        std::advance(it, static_cast<long>(rng() % n));
        it->second.bytes[0] ^= 0x01;
        EXPECT_NE(build_tree(map)->hash(), before);
    }
}

}  // namespace
}  // namespace provledger
