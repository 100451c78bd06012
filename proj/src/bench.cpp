#include "provledger/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "provledger/compose.hpp"
#include "provledger/errors.hpp"
#include "provledger/merkle.hpp"

namespace provledger::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    return std::max(s, 1e-9);
}

Digest random_digest(std::mt19937_64& rng) {
    Digest d;
    for (std::size_t i = 0; i < Digest::kSize; i += 8) {
        const std::uint64_t word = rng();
        for (std::size_t j = 0; j < 8; ++j) {
            d.bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
        }
    }
    return d;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell, std::size_t trial) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct Prepared {
    NodePtr tree;
    std::vector<Entry> sample;
    double build_seconds = 0;
    double split_seconds = 0;
};

Prepared prepare(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    VerifiableMap map;
    while (map.size() < n) {
        map.emplace(random_digest(rng), random_digest(rng));
    }
    Prepared p;
    auto t0 = Clock::now();
    p.tree = build_tree(map);
    p.build_seconds = seconds_since(t0);
    t0 = Clock::now();
    std::vector<Entry> all = split_tree(map, p.tree);
    p.split_seconds = seconds_since(t0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(m);
    p.sample = std::move(all);
    return p;
}

}  // namespace

void BenchConfig::validate() const {
    if (ratios.empty() || sizes.empty()) {
        throw ConfigError("bench needs at least one ratio and one size");
    }
    for (double r : ratios) {
        if (!(r > 0.0 && r <= 1.0)) {
            throw ConfigError("ratio " + std::to_string(r) + " outside (0, 1]");
        }
    }
    for (std::size_t m : sizes) {
        if (m == 0) {
            throw ConfigError("sizes must be positive");
        }
    }
    if (trials == 0) {
        throw ConfigError("trials must be positive");
    }
    for (double r : ratios) {
        for (std::size_t m : sizes) {
            if (population_for(m, r) < m) {
                throw ConfigError("ratio " + std::to_string(r) + " gives n < m");
            }
        }
    }
}

std::size_t population_for(std::size_t m, double ratio) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(m) / ratio));
}

BenchReport run_bench(const BenchConfig& config) {
    config.validate();
    BenchReport report;
    report.has_setup_timings = config.time_setup;
    std::size_t cell = 0;
    for (double ratio : config.ratios) {
        for (std::size_t m : config.sizes) {
            const std::size_t n = population_for(m, ratio);
            double log_sum = 0;
            double sum = 0;
            for (std::size_t trial = 0; trial < config.trials; ++trial) {
                const Prepared p = prepare(n, m, cell_seed(config.seed, cell, trial));
                if (trial == 0) {
                    (void)merge_tree(p.sample);  // warm-up, untimed
                }
                const auto t0 = Clock::now();
                const DerivativeTree merged = merge_tree(p.sample);
                const double secs = seconds_since(t0);
                if (merged.source_root != p.tree->hash()) {
                    throw RootMismatchError("bench: ratio " + std::to_string(ratio) + " m " +
                                            std::to_string(m) + " trial " + std::to_string(trial) +
                                            " merged to a different root");
                }
                report.rows.push_back(BenchRow{ratio, m, n, trial, secs, p.build_seconds,
                                               p.split_seconds, merged.source_root});
                log_sum += std::log(secs);
                sum += secs;
            }
            const auto t = static_cast<double>(config.trials);
            report.summaries.push_back(BenchSummary{ratio, m, n, std::exp(log_sum / t), sum / t});
            ++cell;
        }
    }
    return report;
}

std::map<double, double> fit_scaling(const BenchReport& report) {
    std::map<double, std::vector<std::pair<double, double>>> points;
    for (const BenchSummary& s : report.summaries) {
        points[s.ratio].emplace_back(std::log(static_cast<double>(s.m)), std::log(s.geomean));
    }
    if (points.empty()) {
        throw ConfigError("report has no summaries to fit");
    }
    std::map<double, double> slopes;
    for (const auto& [ratio, pts] : points) {
        if (pts.size() < 4) {
            throw ConfigError("ratio " + std::to_string(ratio) + " has " +
                              std::to_string(pts.size()) + " sizes; need at least 4");
        }
        const double k = static_cast<double>(pts.size());
        double mx = 0;
        double my = 0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= k;
        my /= k;
        double sxy = 0;
        double sxx = 0;
        for (const auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        if (sxx == 0) {
            throw ConfigError("ratio " + std::to_string(ratio) + " has no spread in m");
        }
        slopes[ratio] = sxy / sxx;
    }
    return slopes;
}

void write_csv(std::ostream& out, const BenchReport& report) {
    const auto old_precision = out.precision(9);
    out << "ratio,m,n,trial,seconds";
    if (report.has_setup_timings) {
        out << ",build_seconds,split_seconds";
    }
    out << '\n';
    for (const BenchRow& r : report.rows) {
        out << r.ratio << ',' << r.m << ',' << r.n << ',' << r.trial << ',' << r.seconds;
        if (report.has_setup_timings) {
            out << ',' << r.build_seconds << ',' << r.split_seconds;
        }
        out << '\n';
    }
    const char* pad = report.has_setup_timings ? ",," : "";
    for (const BenchSummary& s : report.summaries) {
        out << s.ratio << ',' << s.m << ',' << s.n << ",geomean," << s.geomean << pad << '\n';
        out << s.ratio << ',' << s.m << ',' << s.n << ",mean," << s.mean << pad << '\n';
    }
    out.precision(old_precision);
}

}  // namespace provledger::bench
