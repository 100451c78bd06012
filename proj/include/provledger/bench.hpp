#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "provledger/digest.hpp"

namespace provledger::bench {

struct BenchConfig {
    std::vector<double> ratios{1.0, 0.1, 0.01};  // m / n, each in (0, 1]
    std::vector<std::size_t> sizes;              // m values
    std::size_t trials = 10;
    std::uint64_t seed = 42;
    bool time_setup = false;  // also time build_tree and split_tree

    // Throws ConfigError.
    void validate() const;
};

struct BenchRow {
    double ratio = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t trial = 0;
    double seconds = 0;        // merge only
    double build_seconds = 0;  // filled when time_setup
    double split_seconds = 0;
    Digest root;               // checked against the source tree every trial
};

struct BenchSummary {
    double ratio = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    double geomean = 0;
    double mean = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchSummary> summaries;
    bool has_setup_timings = false;
};

std::size_t population_for(std::size_t m, double ratio);

// Times merge_tree over m sampled entries of a random n-entry map, for
// every (ratio, size) cell. A root mismatch aborts with RootMismatchError.
BenchReport run_bench(const BenchConfig& config);

// Least-squares slope of log(geomean seconds) against log(m), per ratio.
// Throws ConfigError with fewer than four sizes for a ratio.
std::map<double, double> fit_scaling(const BenchReport& report);

// Columns ratio,m,n,trial,seconds; summaries use trial=geomean and trial=mean.
void write_csv(std::ostream& out, const BenchReport& report);

}  // namespace provledger::bench
