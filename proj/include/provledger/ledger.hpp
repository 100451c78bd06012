#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "provledger/compose.hpp"
#include "provledger/digest.hpp"
#include "provledger/merkle.hpp"

namespace provledger {

using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

// One notarized step of discrete time.
struct Block {
    std::uint64_t index = 0;
    Digest root;
    Digest prev_hash;  // kEmpty for genesis
    Signature signature{};

    // H(be64(index) || root || prev_hash); this is what the notary signs.
    [[nodiscard]] Digest signing_digest() const;
    // H(be64(index) || root || prev_hash || signature); the next block links to it.
    [[nodiscard]] Digest record_hash() const;

    friend bool operator==(const Block&, const Block&) = default;
};

// Single-signer Ed25519 hash chain. One writer at a time.
class Notary {
public:
    // Deterministic key pair from a 32-byte seed.
    Notary(std::string id, const Digest& seed);
    static Notary generate(std::string id);

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] const PublicKey& public_key() const { return public_key_; }
    [[nodiscard]] const Digest& seed() const { return seed_; }
    [[nodiscard]] const std::vector<Block>& chain() const { return chain_; }

    Block append(const Digest& root);

    // Replaces the chain with one loaded from storage. Throws SignatureError
    // if it does not verify under this notary's key.
    void restore_chain(std::vector<Block> chain);

private:
    std::string id_;
    Digest seed_;
    PublicKey public_key_{};
    std::array<std::uint8_t, 64> secret_key_{};
    std::vector<Block> chain_;
};

bool verify_block(const Block& block, const PublicKey& key,
                  const std::optional<Block>& prev = std::nullopt);
bool verify_chain(std::span<const Block> chain, const PublicKey& key);

struct Snapshot {
    Digest root;
    std::shared_ptr<const VerifiableMap> map;
    NodePtr tree;
};

// Provenance claim for one key at one block.
struct Commitment {
    Entry entry;
    std::string notary_id;
    Block block;
};

bool verify_commitment(const Commitment& c, const PublicKey& key);

// Maintains a verifiable map and notarizes its root on every commit.
class Journal {
public:
    explicit Journal(Notary notary) : notary_(std::move(notary)) {}

    // Inserts or overwrites, rebuilds, notarizes. Throws EmptyMapError if
    // the resulting map is empty.
    Block commit(std::span<const std::pair<Key, Value>> updates);

    [[nodiscard]] const Notary& notary() const { return notary_; }
    [[nodiscard]] const VerifiableMap& map() const;
    [[nodiscard]] const std::map<std::uint64_t, Snapshot>& history() const { return history_; }
    // Throws BlockNotFoundError.
    [[nodiscard]] const Snapshot& snapshot(std::uint64_t block_index) const;
    [[nodiscard]] const Block& block(std::uint64_t block_index) const;

    [[nodiscard]] Commitment commitment(std::uint64_t block_index, const Key& key) const;

    // Directory layout: notary.json, chain.json, snapshots/<index>.json.
    void save(const std::filesystem::path& dir) const;
    static Journal load(const std::filesystem::path& dir);

private:
    Notary notary_;
    std::map<std::uint64_t, Snapshot> history_;
};

struct TransferPackage {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    std::string notary_id;
    Block block;
    std::variant<std::vector<Entry>, Bytes> payload;

    [[nodiscard]] bool is_multiproof() const { return std::holds_alternative<Bytes>(payload); }
};

TransferPackage export_package(const Journal& journal, std::uint64_t block_index,
                               std::span<const Key> keys, bool use_multiproof);

// Checks the block signature and merges the payload against block.root.
DerivativeTree open_package(const TransferPackage& package, const PublicKey& key);

// Derivatives received from other notaries, keyed by (notary id, block index).
class DerivativeStore {
public:
    using Slot = std::pair<std::string, std::uint64_t>;

    [[nodiscard]] const DerivativeTree* find(const std::string& notary_id,
                                             std::uint64_t block_index) const;
    [[nodiscard]] const std::map<Slot, DerivativeTree>& trees() const { return trees_; }
    void put(const std::string& notary_id, std::uint64_t block_index, DerivativeTree tree);

    // One <hex(notary id)>-<index>.json per derivative holding its multiproof.
    void save(const std::filesystem::path& dir) const;
    static DerivativeStore load(const std::filesystem::path& dir);

private:
    std::map<Slot, DerivativeTree> trees_;
};

// Re-importing a block unions the key sets; the union must still merge to
// block.root. Throws SignatureError, RootMismatchError, ConflictError.
DerivativeTree import_package(DerivativeStore& store, const TransferPackage& package,
                              const PublicKey& key);

// Where a foreign block's root is placed in an adopting journal's map.
Key adoption_key(const std::string& notary_id, std::uint64_t block_index);

// Imports the package, then commits its root into `journal` under
// adoption_key. The journal is untouched if the import fails.
Block adopt_package(Journal& journal, DerivativeStore& store, const TransferPackage& package,
                    const PublicKey& key);

// Chain of (key, value, proof) segments through a hierarchy of maps: each
// segment's value is the root of the map the next segment proves into.
struct NestedProof {
    std::vector<Entry> segments;
};

// `levels[j]` is the tree the j-th path key is looked up in. Throws
// KeyNotFoundError, or LedgerError if a value is not the next level's root.
NestedProof get_nested_proof(std::span<const NodePtr> levels, std::span<const Key> path);
bool verify_nested(const Digest& root, const NestedProof& proof);

// Two-segment proof of a foreign entry under the local block that adopted it.
NestedProof adopted_nested_proof(const Journal& journal, std::uint64_t local_block,
                                 const std::string& foreign_notary, std::uint64_t foreign_block,
                                 const Entry& foreign_entry);

// JSON surfaces.
nlohmann::json to_json(const Block& block);
Block block_from_json(const nlohmann::json& j);
nlohmann::json entries_to_json(std::span<const Entry> entries);
std::vector<Entry> entries_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TransferPackage& package);
TransferPackage package_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Commitment& c);
Commitment commitment_from_json(const nlohmann::json& j);

std::string base64_encode(ByteView data);
Bytes base64_decode(std::string_view text);

}  // namespace provledger
