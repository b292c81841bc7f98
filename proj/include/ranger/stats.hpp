#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "ranger/rangeindex.hpp"

namespace ranger {

struct IndexStats {
    unsigned k = 0;
    unsigned w = 0;
    unsigned value_bits = 64;
    std::uint64_t keys = 0;        // unique keys
    std::uint64_t occurrences = 0; // sum of position-list lengths
    std::uint64_t singletons = 0;
    double singleton_fraction = 0.0;
    std::uint64_t buckets = 0;
    double utilization = 0.0; // keys / (32 * buckets)
    std::uint64_t model_bytes = 0;
    std::uint64_t range_bytes = 0;
    std::uint64_t bucket_bytes = 0;
    std::uint64_t position_bytes = 0;
    std::uint64_t index_bytes = 0; // model + ranges + buckets
    std::vector<std::size_t> stage_widths;
    std::uint32_t max_leaf_error = 0;
    double mean_leaf_error = 0.0;
    unsigned probe_steps_bound = 0;  // ceil(log2(2e + 2))
    unsigned range_line_bound = 0;   // distinct 64 B lines a bounded search may touch
    unsigned worst_case_accesses = 3; // range array + bucket + position list
    std::uint64_t max_list_length = 1;
    std::uint64_t worst_case_bytes = 0;
};

/// Predecessor-search comparisons needed for a window of 2e + 1 ranges.
unsigned probe_steps_bound(std::uint32_t error) noexcept;
/// Cache lines touched by that search over 8-byte bounds: ceil(log2(lines)) + 1.
unsigned range_line_bound(std::uint32_t error) noexcept;
/// One range-array line + one bucket + the longest position list (records only).
std::uint64_t worst_case_bytes(ValueWidth w, std::uint64_t max_list_length) noexcept;

IndexStats compute_stats(const RangerIndex& index);

/// Human-readable block followed by a key=value block.
void print_stats(std::ostream& os, const IndexStats& s);

} // namespace ranger
