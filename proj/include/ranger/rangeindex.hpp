#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranger/bucket.hpp"
#include "ranger/keycodec.hpp"
#include "ranger/rqrmi.hpp"
#include "ranger/seeds.hpp"

namespace ranger {

inline constexpr std::uint16_t kFormatVersion = 1;

struct IndexHeader {
    unsigned k = 0;
    unsigned w = 0;
    ValueWidth value_width = ValueWidth::bits64;
    std::uint64_t entry_count = 0;
    std::uint64_t bucket_count = 0;

    friend bool operator==(const IndexHeader&, const IndexHeader&) = default;
};

struct BuildOptions {
    unsigned w = 0; // recorded in the header; the table already reflects it
    ValueWidth value_width = ValueWidth::bits64;
    rqrmi::TrainConfig model;
    std::optional<std::size_t> max_positions; // drop keys with more positions
};

/// Certified window of candidate ranges for a key.
struct RangeWindow {
    std::int64_t estimate = 0;
    std::uint32_t error = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;
};

struct RangeSearch {
    bool found = false;
    std::size_t bucket = 0;
    unsigned steps = 0;
};

struct DeserializeOptions {
    bool verify_checksum = true;
};

using LookupResult = std::optional<std::vector<Position>>;

/// Bucketized seed index located by a learned range model.
///
/// Keys are cut, in order, into buckets of at most 32 entries; a bucket is
/// sealed early when the next key's 15-bit hash already occurs in it. Each
/// bucket is the range [lower bound, next lower bound). A lookup infers a
/// window of ranges, binary-searches the predecessor lower bound inside it,
/// then compares the key's hash against the bucket's 32 slots.
class RangerIndex {
public:
    static RangerIndex build(const SeedTable& table, const BuildOptions& options, rqrmi::TrainLog* log = nullptr);

    const IndexHeader& header() const noexcept { return header_; }
    const RqrmiModel& model() const noexcept { return model_; }
    std::span<const std::uint64_t> lower_bounds() const noexcept { return lower_bounds_; }
    std::size_t bucket_count() const noexcept { return lower_bounds_.size(); }

    const std::uint16_t* bucket_hashes(std::size_t b) const noexcept {
        return reinterpret_cast<const std::uint16_t*>(buckets_.data() + b * stride_);
    }
    std::uint64_t bucket_value(std::size_t b, std::size_t slot) const noexcept {
        return read_value(buckets_.data() + b * stride_ + kHashBlockBytes, slot);
    }
    std::uint64_t position_record(std::size_t i) const noexcept { return read_value(positions_.data(), i); }
    std::size_t position_records() const noexcept { return positions_.size() / value_bytes(header_.value_width); }
    std::span<const std::byte> bucket_section() const noexcept { return buckets_; }
    std::span<const std::byte> position_section() const noexcept { return positions_; }

    // lookup phases, exposed for instrumentation
    RangeWindow locate(std::uint64_t key) const noexcept;
    RangeSearch search(std::uint64_t key, const RangeWindow& window) const noexcept;
    int probe(std::size_t bucket, std::uint64_t key) const noexcept {
        return probe_hashes(bucket_hashes(bucket), hash15(key));
    }
    void fetch(std::size_t bucket, int slot, std::vector<Position>& out) const;

    /// Exact positions for indexed keys; for other keys not-found except on a
    /// 15-bit hash collision inside the matched bucket.
    LookupResult lookup(Key64 key) const;

    std::vector<std::byte> serialize() const;
    void save(const std::filesystem::path& path) const;
    static RangerIndex deserialize(std::span<const std::byte> bytes, DeserializeOptions options = {});
    static RangerIndex load(const std::filesystem::path& path, DeserializeOptions options = {});

    /// Hash uniqueness, prefix validity, range monotonicity and containment,
    /// position-store bounds. Empty when the structure is sound.
    std::vector<std::string> structural_violations() const;

private:
    std::uint64_t read_value(const std::byte* base, std::size_t i) const noexcept {
        if (header_.value_width == ValueWidth::bits64) {
            std::uint64_t v;
            std::memcpy(&v, base + 8 * i, 8);
            return v;
        }
        std::uint32_t v;
        std::memcpy(&v, base + 4 * i, 4);
        return v;
    }
    void check_position_store() const;

    IndexHeader header_;
    RqrmiModel model_;
    std::vector<std::uint64_t> lower_bounds_;
    AlignedBytes buckets_;
    std::size_t stride_ = bucket_bytes(ValueWidth::bits64);
    std::vector<std::byte> positions_;
};

/// OpenMP batch lookup; results are positionally aligned with `keys`.
/// `threads` <= 0 uses the OpenMP default.
std::vector<LookupResult> batch_lookup(const RangerIndex& index, std::span<const Key64> keys, int threads = 0);

/// Serial reference for batch_lookup.
std::vector<LookupResult> batch_lookup_serial(const RangerIndex& index, std::span<const Key64> keys);

} // namespace ranger
