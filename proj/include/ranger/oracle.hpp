#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "ranger/bucket.hpp"
#include "ranger/rangeindex.hpp"
#include "ranger/seeds.hpp"

namespace ranger {

/// Exact key -> positions map used as ground truth.
class ExactMap {
public:
    static ExactMap build(const SeedTable& table);
    static ExactMap build(std::span<const MinimizerEntry> entries); // throws BuildError on duplicate keys

    std::size_t size() const noexcept { return map_.size(); }
    bool contains(std::uint64_t key) const noexcept { return map_.contains(key); }
    const std::vector<Position>* find(std::uint64_t key) const noexcept;

private:
    std::unordered_map<std::uint64_t, std::vector<Position>> map_;
};

/// Power-of-two open addressing at load <= 0.77, slots of an 8-byte key plus one value.
inline constexpr double kHashModelLoad = 0.77;
inline constexpr std::size_t kHashModelKeyBytes = 8;

std::uint64_t model_hash_capacity(std::uint64_t n);
std::uint64_t model_hash_bytes(std::uint64_t n, ValueWidth w);

struct HashModelReport {
    std::uint64_t entries = 0;
    std::uint64_t modeled_capacity = 0;
    std::uint64_t modeled_index_bytes = 0;
    std::uint64_t ranger_index_bytes = 0; // model + ranges + buckets
    std::uint64_t position_bytes = 0;
    double utilization = 0.0;
    double ratio = 0.0; // modeled_index_bytes / ranger_index_bytes
};

HashModelReport compare_footprint(const RangerIndex& index, std::uint64_t n);
void print_footprint(std::ostream& os, const HashModelReport& r);

} // namespace ranger
