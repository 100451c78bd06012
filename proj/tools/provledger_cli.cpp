// provledger: command-line front end for journals, transfer packages,
// commitment verification and the merge benchmark.
//
// Exit codes: 0 success, 1 verification failure, 2 malformed input,
// 3 configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "provledger/bench.hpp"
#include "provledger/errors.hpp"
#include "provledger/ledger.hpp"

namespace fs = std::filesystem;
using namespace provledger;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kMalformed = 2, kConfig = 3 };

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DecodeError("cannot read " + path.string());
    }
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

json read_json_file(const fs::path& path) {
    const Bytes raw = read_file(path);
    try {
        return json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write " + path);
    }
    out << text;
}

// "0x<64 hex>" names a raw key; anything else is hashed into one.
Key parse_key(const std::string& name) {
    if (name.size() == 66 && name.rfind("0x", 0) == 0) {
        return Digest::from_hex(name.substr(2));
    }
    return digest_key(name);
}

PublicKey parse_pubkey(const std::string& hex) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != PublicKey{}.size()) {
        throw DecodeError("public key must be 32 bytes of hex");
    }
    PublicKey key{};
    std::copy(raw.begin(), raw.end(), key.begin());
    return key;
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse(item));
        }
    }
    return out;
}

double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
}

std::size_t parse_size(const std::string& s) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("not a size: '" + s + "'");
    }
}

void print_block(const Block& b) {
    std::cout << "block " << b.index << " root " << b.root.hex() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Composable verifiable-map ledgers for archive provenance"};
    app.require_subcommand(1);

    std::string dir;
    std::string notary_id = "journal";
    std::string seed_hex;
    auto* init = app.add_subcommand("init", "Create a journal directory with a fresh notary key");
    init->add_option("dir", dir)->required();
    init->add_option("--notary-id", notary_id, "Notary identifier");
    init->add_option("--seed", seed_hex, "32-byte hex seed for a deterministic key");

    std::vector<std::string> kvs;
    auto* commit = app.add_subcommand("commit", "Commit name=file pairs and notarize the new root");
    commit->add_option("dir", dir)->required();
    commit->add_option("--kv", kvs, "name=file; the value is SHA-256 of the file")->required();

    std::uint64_t block_index = 0;
    std::string keys_csv;
    bool multiproof = false;
    std::string out_path;
    auto* exp = app.add_subcommand("export", "Split commitments of one block into a package");
    exp->add_option("dir", dir)->required();
    exp->add_option("--block", block_index)->required();
    exp->add_option("--keys", keys_csv, "Comma-separated names (or 0x<hex> keys)")->required();
    exp->add_flag("--multiproof", multiproof, "Encode the payload as a multiproof");
    exp->add_option("-o,--output", out_path)->required();

    std::string store_dir;
    std::string pkg_path;
    std::string pubkey_hex;
    auto* imp = app.add_subcommand("import", "Merge a package into a derivative store");
    imp->add_option("store", store_dir)->required();
    imp->add_option("package", pkg_path)->required();
    imp->add_option("--pubkey", pubkey_hex, "Source notary public key (hex)")->required();

    auto* adopt = app.add_subcommand("adopt", "Import a package and commit its root locally");
    adopt->add_option("dir", dir)->required();
    adopt->add_option("package", pkg_path)->required();
    adopt->add_option("--pubkey", pubkey_hex, "Source notary public key (hex)")->required();
    adopt->add_option("--store", store_dir, "Derivative store (default <dir>/imports)");

    std::string commitment_path;
    auto* verify = app.add_subcommand("verify", "Verify a commitment file");
    verify->add_option("commitment", commitment_path)->required();
    verify->add_option("--pubkey", pubkey_hex)->required();

    std::string key_name;
    auto* cm = app.add_subcommand("commitment", "Write the commitment for one key at one block");
    cm->add_option("dir", dir)->required();
    cm->add_option("--block", block_index)->required();
    cm->add_option("--key", key_name)->required();
    cm->add_option("-o,--output", out_path);

    auto* pub = app.add_subcommand("pubkey", "Print the journal's notary public key");
    pub->add_option("dir", dir)->required();

    std::string ratios_csv = "1,0.1,0.01";
    std::string sizes_csv = "1024,2048,4096,8192,16384,32768,65536,131072";
    bench::BenchConfig cfg;
    bool fit = false;
    auto* bench_cmd = app.add_subcommand("bench", "Time merge_tree across subset ratios and sizes");
    bench_cmd->add_option("--ratios", ratios_csv, "m/n ratios in (0,1]");
    bench_cmd->add_option("--sizes", sizes_csv, "m values");
    bench_cmd->add_option("--trials", cfg.trials);
    bench_cmd->add_option("--seed", cfg.seed);
    bench_cmd->add_flag("--time-setup", cfg.time_setup, "Also time tree build and split");
    bench_cmd->add_flag("--fit", fit, "Print log-log slope per ratio to stderr");
    bench_cmd->add_option("-o,--output", out_path, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*init) {
            Notary notary = seed_hex.empty() ? Notary::generate(notary_id)
                                             : Notary(notary_id, Digest::from_hex(seed_hex));
            if (fs::exists(fs::path(dir) / "chain.json")) {
                throw ConfigError(dir + " already holds a journal");
            }
            Journal(std::move(notary)).save(dir);
            std::cout << to_hex(Journal::load(dir).notary().public_key()) << '\n';
        } else if (*commit) {
            Journal journal = Journal::load(dir);
            std::vector<std::pair<Key, Value>> updates;
            for (const std::string& kv : kvs) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ConfigError("--kv expects name=file, got '" + kv + "'");
                }
                updates.emplace_back(digest_key(kv.substr(0, eq)), sha256(read_file(kv.substr(eq + 1))));
            }
            print_block(journal.commit(updates));
            journal.save(dir);
        } else if (*exp) {
            const Journal journal = Journal::load(dir);
            const auto keys = split_list<Key>(keys_csv, parse_key);
            write_text(out_path, to_json(export_package(journal, block_index, keys, multiproof)).dump(2) + "\n");
        } else if (*imp) {
            DerivativeStore store = DerivativeStore::load(store_dir);
            const auto pkg = package_from_json(read_json_file(pkg_path));
            const DerivativeTree tree = import_package(store, pkg, parse_pubkey(pubkey_hex));
            store.save(store_dir);
            std::cout << "imported " << pkg.notary_id << " block " << pkg.block.index << " root "
                      << tree.source_root.hex() << " leaves " << tree.leaf_count() << '\n';
        } else if (*adopt) {
            Journal journal = Journal::load(dir);
            const fs::path store_path = store_dir.empty() ? fs::path(dir) / "imports" : fs::path(store_dir);
            DerivativeStore store = DerivativeStore::load(store_path);
            const auto pkg = package_from_json(read_json_file(pkg_path));
            print_block(adopt_package(journal, store, pkg, parse_pubkey(pubkey_hex)));
            store.save(store_path);
            journal.save(dir);
        } else if (*verify) {
            const Commitment c = commitment_from_json(read_json_file(commitment_path));
            if (!verify_commitment(c, parse_pubkey(pubkey_hex))) {
                std::cout << "INVALID\n";
                return kVerifyFailed;
            }
            std::cout << "OK " << c.notary_id << " block " << c.block.index << '\n';
        } else if (*cm) {
            const Journal journal = Journal::load(dir);
            write_text(out_path, to_json(journal.commitment(block_index, parse_key(key_name))).dump(2) + "\n");
        } else if (*pub) {
            std::cout << to_hex(Journal::load(dir).notary().public_key()) << '\n';
        } else if (*bench_cmd) {
            cfg.ratios = split_list<double>(ratios_csv, parse_double);
            cfg.sizes = split_list<std::size_t>(sizes_csv, parse_size);
            const bench::BenchReport report = bench::run_bench(cfg);
            std::ostringstream csv;
            bench::write_csv(csv, report);
            write_text(out_path, csv.str());
            if (fit) {
                for (const auto& [ratio, slope] : bench::fit_scaling(report)) {
                    std::cerr << "ratio " << ratio << " slope " << slope << '\n';
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const SignatureError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const RootMismatchError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const ConflictError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const LedgerError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMalformed;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMalformed;
    }
    return kOk;
}
