#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "ranger/rangeindex.hpp"

namespace ranger {

struct BenchConfig {
    std::size_t keys = 1'000'000;
    std::uint64_t seed = 1;
    double indexed_fraction = 0.5;
    unsigned warmup = 3;
    unsigned repetitions = 5;
    int threads = 0; // parallel batch comparison; <= 0 = OpenMP default
};

struct PhaseTiming {
    double mean_ns = 0.0;   // per key, mean over repetitions
    double median_ns = 0.0; // per key, median over repetitions
};

struct BenchReport {
    std::size_t keys = 0;
    std::size_t indexed_keys = 0;
    std::size_t found = 0;
    std::size_t not_found = 0;
    PhaseTiming inference;
    PhaseTiming range_search;
    PhaseTiming bucket_probe;
    PhaseTiming position_fetch;
    PhaseTiming end_to_end;
    double phase_sum_ratio = 0.0; // sum of phase means / end-to-end mean
    double p50_ns = 0.0;
    double p90_ns = 0.0;
    double p99_ns = 0.0;
    double throughput_mlps = 0.0; // million lookups per second
    double serial_batch_ns = 0.0;
    double parallel_batch_ns = 0.0;
    std::vector<std::uint64_t> step_histogram; // [steps] -> lookups
    std::vector<std::uint64_t> line_histogram; // [distinct range-array lines] -> lookups
    unsigned max_steps = 0;
    unsigned steps_bound = 0;
    unsigned max_lines = 0;
    std::uint32_t certified_error = 0;
};

/// Times the lookup phases separately and end to end over a seeded mix of
/// keys drawn from `indexed_pool` and uniform random keys.
BenchReport run_bench(const RangerIndex& index, const BenchConfig& config, std::span<const std::uint64_t> indexed_pool);

/// Distinct 64-byte lines of the range array touched by the bounded predecessor search.
unsigned search_lines(const RangerIndex& index, std::uint64_t key, const RangeWindow& window);

void print_bench(std::ostream& os, const BenchReport& r);

} // namespace ranger
