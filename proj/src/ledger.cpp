#include "provledger/ledger.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>

#include "provledger/errors.hpp"

namespace provledger {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_be64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(const std::string& hex, const char* what) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != N) {
        throw DecodeError(std::string(what) + " must be " + std::to_string(N) + " bytes");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DecodeError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw LedgerError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

// Wraps nlohmann's type/key errors into DecodeError.
template <typename F>
auto decoding(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw DecodeError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

// Block

Digest Block::signing_digest() const {
    Bytes msg;
    put_be64(msg, index);
    append(msg, root.bytes);
    append(msg, prev_hash.bytes);
    return sha256(msg);
}

Digest Block::record_hash() const {
    Bytes msg;
    put_be64(msg, index);
    append(msg, root.bytes);
    append(msg, prev_hash.bytes);
    append(msg, signature);
    return sha256(msg);
}

// Notary

Notary::Notary(std::string id, const Digest& seed) : id_(std::move(id)), seed_(seed) {
    crypto_sign_seed_keypair(public_key_.data(), secret_key_.data(), seed_.bytes.data());
}

Notary Notary::generate(std::string id) {
    Digest seed;
    randombytes_buf(seed.bytes.data(), seed.bytes.size());
    return Notary(std::move(id), seed);
}

Block Notary::append(const Digest& root) {
    Block b;
    b.index = chain_.size();
    b.root = root;
    b.prev_hash = chain_.empty() ? kEmpty : chain_.back().record_hash();
    const Digest msg = b.signing_digest();
    crypto_sign_detached(b.signature.data(), nullptr, msg.bytes.data(), msg.bytes.size(),
                         secret_key_.data());
    chain_.push_back(b);
    return b;
}

void Notary::restore_chain(std::vector<Block> chain) {
    if (!verify_chain(chain, public_key_)) {
        throw SignatureError("stored chain of notary '" + id_ + "' does not verify");
    }
    chain_ = std::move(chain);
}

bool verify_block(const Block& block, const PublicKey& key, const std::optional<Block>& prev) {
    const Digest msg = block.signing_digest();
    if (crypto_sign_verify_detached(block.signature.data(), msg.bytes.data(), msg.bytes.size(),
                                    key.data()) != 0) {
        return false;
    }
    if (!prev) {
        return block.index == 0 && block.prev_hash == kEmpty;
    }
    return block.index == prev->index + 1 && block.prev_hash == prev->record_hash();
}

bool verify_chain(std::span<const Block> chain, const PublicKey& key) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto prev = i == 0 ? std::nullopt : std::optional<Block>(chain[i - 1]);
        if (!verify_block(chain[i], key, prev)) {
            return false;
        }
    }
    return true;
}

bool verify_commitment(const Commitment& c, const PublicKey& key) {
    if (!verify_proof(c.block.root, c.entry.key, c.entry.value, c.entry.proof)) {
        return false;
    }
    const Digest msg = c.block.signing_digest();
    return crypto_sign_verify_detached(c.block.signature.data(), msg.bytes.data(),
                                       msg.bytes.size(), key.data()) == 0;
}

// Journal

Block Journal::commit(std::span<const std::pair<Key, Value>> updates) {
    auto next = history_.empty() ? std::make_shared<VerifiableMap>()
                                 : std::make_shared<VerifiableMap>(*history_.rbegin()->second.map);
    for (const auto& [k, v] : updates) {
        (*next)[k] = v;
    }
    NodePtr tree = build_tree(*next);
    const Block block = notary_.append(tree->hash());
    history_.emplace(block.index, Snapshot{tree->hash(), std::move(next), std::move(tree)});
    return block;
}

const VerifiableMap& Journal::map() const {
    static const VerifiableMap kNone;
    return history_.empty() ? kNone : *history_.rbegin()->second.map;
}

const Snapshot& Journal::snapshot(std::uint64_t block_index) const {
    const auto it = history_.find(block_index);
    if (it == history_.end()) {
        throw BlockNotFoundError("journal of '" + notary_.id() + "' has no block " +
                                 std::to_string(block_index));
    }
    return it->second;
}

const Block& Journal::block(std::uint64_t block_index) const {
    (void)snapshot(block_index);
    return notary_.chain().at(block_index);
}

Commitment Journal::commitment(std::uint64_t block_index, const Key& key) const {
    const Snapshot& snap = snapshot(block_index);
    const auto it = snap.map->find(key);
    if (it == snap.map->end()) {
        throw KeyNotFoundError("key " + key.hex() + " not in block " + std::to_string(block_index));
    }
    return Commitment{Entry{key, it->second, get_proof(snap.tree, key)}, notary_.id(),
                      block(block_index)};
}

void Journal::save(const fs::path& dir) const {
    fs::create_directories(dir / "snapshots");
    write_json(dir / "notary.json", json{{"notary_id", notary_.id()},
                                         {"seed", notary_.seed().hex()},
                                         {"public_key", to_hex(notary_.public_key())}});
    json blocks = json::array();
    for (const Block& b : notary_.chain()) {
        blocks.push_back(to_json(b));
    }
    write_json(dir / "chain.json", json{{"notary_id", notary_.id()},
                                        {"public_key", to_hex(notary_.public_key())},
                                        {"blocks", blocks}});
    for (const auto& [index, snap] : history_) {
        const fs::path file = dir / "snapshots" / (std::to_string(index) + ".json");
        if (fs::exists(file)) {
            continue;  // snapshots are immutable once written
        }
        json m = json::object();
        for (const auto& [k, v] : *snap.map) {
            m[k.hex()] = v.hex();
        }
        write_json(file, m);
    }
}

Journal Journal::load(const fs::path& dir) {
    const json meta = read_json(dir / "notary.json");
    const json chain_json = read_json(dir / "chain.json");
    return decoding("journal", [&] {
        Notary notary(meta.at("notary_id").get<std::string>(),
                      Digest::from_hex(meta.at("seed").get<std::string>()));
        std::vector<Block> chain;
        for (const json& b : chain_json.at("blocks")) {
            chain.push_back(block_from_json(b));
        }
        notary.restore_chain(chain);

        Journal journal(std::move(notary));
        for (const Block& b : journal.notary_.chain()) {
            const json snap = read_json(dir / "snapshots" / (std::to_string(b.index) + ".json"));
            auto map = std::make_shared<VerifiableMap>();
            for (const auto& [k, v] : snap.items()) {
                map->emplace(Digest::from_hex(k), Digest::from_hex(v.get<std::string>()));
            }
            NodePtr tree = build_tree(*map);
            if (tree->hash() != b.root) {
                throw RootMismatchError("snapshot " + std::to_string(b.index) +
                                        " does not match its notarized root");
            }
            journal.history_.emplace(b.index, Snapshot{b.root, std::move(map), std::move(tree)});
        }
        return journal;
    });
}

// Transfer

TransferPackage export_package(const Journal& journal, std::uint64_t block_index,
                               std::span<const Key> keys, bool use_multiproof) {
    const Snapshot& snap = journal.snapshot(block_index);
    VerifiableMap subset;
    for (const Key& k : keys) {
        const auto it = snap.map->find(k);
        if (it == snap.map->end()) {
            throw KeyNotFoundError("key " + k.hex() + " not in block " + std::to_string(block_index));
        }
        subset.insert(*it);
    }
    std::vector<Entry> entries = split_tree(subset, snap.tree);

    TransferPackage pkg;
    pkg.notary_id = journal.notary().id();
    pkg.block = journal.block(block_index);
    if (use_multiproof) {
        pkg.payload = encode_multiproof(merge_tree(entries, snap.root));
    } else {
        pkg.payload = std::move(entries);
    }
    return pkg;
}

DerivativeTree open_package(const TransferPackage& package, const PublicKey& key) {
    if (package.format_version != TransferPackage::kFormatVersion) {
        throw DecodeError("unsupported package format_version " +
                          std::to_string(package.format_version));
    }
    const Digest msg = package.block.signing_digest();
    if (crypto_sign_verify_detached(package.block.signature.data(), msg.bytes.data(),
                                    msg.bytes.size(), key.data()) != 0) {
        throw SignatureError("block " + std::to_string(package.block.index) + " of '" +
                             package.notary_id + "' has an invalid signature");
    }
    if (const auto* entries = std::get_if<std::vector<Entry>>(&package.payload)) {
        return merge_tree(*entries, package.block.root);
    }
    DerivativeTree tree = decode_multiproof(std::get<Bytes>(package.payload));
    if (tree.source_root != package.block.root) {
        throw RootMismatchError("multiproof root " + tree.source_root.hex() +
                                " != block root " + package.block.root.hex());
    }
    return tree;
}

const DerivativeTree* DerivativeStore::find(const std::string& notary_id,
                                            std::uint64_t block_index) const {
    const auto it = trees_.find(Slot{notary_id, block_index});
    return it == trees_.end() ? nullptr : &it->second;
}

void DerivativeStore::put(const std::string& notary_id, std::uint64_t block_index,
                          DerivativeTree tree) {
    trees_.insert_or_assign(Slot{notary_id, block_index}, std::move(tree));
}

void DerivativeStore::save(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& [slot, tree] : trees_) {
        const std::string name = to_hex(ByteView(reinterpret_cast<const std::uint8_t*>(slot.first.data()),
                                                 slot.first.size()));
        write_json(dir / (name + "-" + std::to_string(slot.second) + ".json"),
                   json{{"notary_id", slot.first},
                        {"block_index", slot.second},
                        {"source_root", tree.source_root.hex()},
                        {"multiproof", base64_encode(encode_multiproof(tree))}});
    }
}

DerivativeStore DerivativeStore::load(const fs::path& dir) {
    DerivativeStore store;
    if (!fs::exists(dir)) {
        return store;
    }
    for (const auto& file : fs::directory_iterator(dir)) {
        if (file.path().extension() != ".json") {
            continue;
        }
        const json j = read_json(file.path());
        decoding("derivative store", [&] {
            DerivativeTree tree = decode_multiproof(base64_decode(j.at("multiproof").get<std::string>()));
            if (tree.source_root != Digest::from_hex(j.at("source_root").get<std::string>())) {
                throw RootMismatchError(file.path().string() + ": stored root does not match tree");
            }
            store.put(j.at("notary_id").get<std::string>(), j.at("block_index").get<std::uint64_t>(),
                      std::move(tree));
            return 0;
        });
    }
    return store;
}

DerivativeTree import_package(DerivativeStore& store, const TransferPackage& package,
                              const PublicKey& key) {
    DerivativeTree incoming = open_package(package, key);
    const DerivativeTree* existing = store.find(package.notary_id, package.block.index);
    if (existing != nullptr) {
        std::map<Key, Entry> all;
        for (Entry& e : existing->entries()) {
            all.emplace(e.key, std::move(e));
        }
        for (Entry& e : incoming.entries()) {
            const auto [it, inserted] = all.emplace(e.key, e);
            if (!inserted && !(it->second == e)) {
                throw ConflictError("re-import disagrees on key " + e.key.hex());
            }
        }
        std::vector<Entry> merged;
        merged.reserve(all.size());
        for (auto& kv : all) {
            merged.push_back(std::move(kv.second));
        }
        incoming = merge_tree(merged, package.block.root);
    }
    store.put(package.notary_id, package.block.index, incoming);
    return incoming;
}

Key adoption_key(const std::string& notary_id, std::uint64_t block_index) {
    Bytes name(notary_id.begin(), notary_id.end());
    put_be64(name, block_index);
    return sha256(name);
}

Block adopt_package(Journal& journal, DerivativeStore& store, const TransferPackage& package,
                    const PublicKey& key) {
    DerivativeStore staged = store;
    import_package(staged, package, key);
    const std::pair<Key, Value> update{adoption_key(package.notary_id, package.block.index),
                                       package.block.root};
    const Block block = journal.commit(std::span(&update, 1));
    store = std::move(staged);
    return block;
}

// Hierarchies

NestedProof get_nested_proof(std::span<const NodePtr> levels, std::span<const Key> path) {
    if (levels.empty() || levels.size() != path.size()) {
        throw LedgerError("nested proof needs one key per level");
    }
    NestedProof np;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const Entry leaf = resplit(DerivativeTree{levels[j], levels[j]->hash()}, path.subspan(j, 1))
                               .front();
        if (j + 1 < levels.size() && leaf.value != levels[j + 1]->hash()) {
            throw LedgerError("value at level " + std::to_string(j) +
                              " is not the root of the next level");
        }
        np.segments.push_back(leaf);
    }
    return np;
}

bool verify_nested(const Digest& root, const NestedProof& proof) {
    if (proof.segments.empty()) {
        return false;
    }
    Digest expected = root;
    for (const Entry& seg : proof.segments) {
        if (!verify_proof(expected, seg.key, seg.value, seg.proof)) {
            return false;
        }
        expected = seg.value;
    }
    return true;
}

NestedProof adopted_nested_proof(const Journal& journal, std::uint64_t local_block,
                                 const std::string& foreign_notary, std::uint64_t foreign_block,
                                 const Entry& foreign_entry) {
    const Commitment link = journal.commitment(local_block, adoption_key(foreign_notary, foreign_block));
    return NestedProof{{link.entry, foreign_entry}};
}

// JSON

json to_json(const Block& block) {
    return json{{"index", block.index},
                {"root", block.root.hex()},
                {"prev_hash", block.prev_hash.hex()},
                {"signature", to_hex(block.signature)}};
}

Block block_from_json(const json& j) {
    return decoding("block", [&] {
        Block b;
        b.index = j.at("index").get<std::uint64_t>();
        b.root = Digest::from_hex(j.at("root").get<std::string>());
        b.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
        b.signature = fixed_from_hex<64>(j.at("signature").get<std::string>(), "signature");
        return b;
    });
}

json entries_to_json(std::span<const Entry> entries) {
    json out = json::array();
    for (const Entry& e : entries) {
        json proof = json::array();
        for (const Digest& s : e.proof.siblings) {
            proof.push_back(s.hex());
        }
        out.push_back(json{{"key", e.key.hex()}, {"value", e.value.hex()}, {"proof", proof}});
    }
    return out;
}

std::vector<Entry> entries_from_json(const json& j) {
    return decoding("entries", [&] {
        if (!j.is_array()) {
            throw DecodeError("entry list must be a JSON array");
        }
        std::vector<Entry> out;
        out.reserve(j.size());
        for (const json& e : j) {
            Entry entry{Digest::from_hex(e.at("key").get<std::string>()),
                        Digest::from_hex(e.at("value").get<std::string>()),
                        {}};
            for (const json& s : e.at("proof")) {
                entry.proof.siblings.push_back(Digest::from_hex(s.get<std::string>()));
            }
            out.push_back(std::move(entry));
        }
        return out;
    });
}

json to_json(const TransferPackage& package) {
    json j{{"format_version", package.format_version},
           {"notary_id", package.notary_id},
           {"block", to_json(package.block)}};
    if (const auto* entries = std::get_if<std::vector<Entry>>(&package.payload)) {
        j["payload_kind"] = "entries";
        j["payload"] = entries_to_json(*entries);
    } else {
        j["payload_kind"] = "multiproof";
        j["payload"] = base64_encode(std::get<Bytes>(package.payload));
    }
    return j;
}

TransferPackage package_from_json(const json& j) {
    return decoding("transfer package", [&] {
        TransferPackage p;
        p.format_version = j.at("format_version").get<int>();
        p.notary_id = j.at("notary_id").get<std::string>();
        p.block = block_from_json(j.at("block"));
        const auto kind = j.at("payload_kind").get<std::string>();
        if (kind == "entries") {
            p.payload = entries_from_json(j.at("payload"));
        } else if (kind == "multiproof") {
            p.payload = base64_decode(j.at("payload").get<std::string>());
        } else {
            throw DecodeError("unknown payload_kind '" + kind + "'");
        }
        return p;
    });
}

json to_json(const Commitment& c) {
    const Entry* e = &c.entry;
    json j = entries_to_json(std::span(e, 1)).front();
    j["notary_id"] = c.notary_id;
    j["block"] = to_json(c.block);
    return j;
}

Commitment commitment_from_json(const json& j) {
    return decoding("commitment", [&] {
        Commitment c;
        c.entry = entries_from_json(json::array({j})).front();
        c.notary_id = j.at("notary_id").get<std::string>();
        c.block = block_from_json(j.at("block"));
        return c;
    });
}

std::string base64_encode(ByteView data) {
    constexpr int kVariant = sodium_base64_VARIANT_ORIGINAL;
    std::string out(sodium_base64_encoded_len(data.size(), kVariant), '\0');
    sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), kVariant);
    out.pop_back();  // trailing NUL
    return out;
}

Bytes base64_decode(std::string_view text) {
    Bytes out(text.size() / 4 * 3 + 3);
    std::size_t len = 0;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, nullptr,
                          sodium_base64_VARIANT_ORIGINAL) != 0) {
        throw DecodeError("invalid base64 payload");
    }
    out.resize(len);
    return out;
}

}  // namespace provledger
