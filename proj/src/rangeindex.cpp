#include "ranger/rangeindex.hpp"

#include <algorithm>
#include <array>

#include "ranger/bytes.hpp"
#include "ranger/errors.hpp"

namespace ranger {

namespace {

void write_value(std::byte* base, std::size_t i, std::uint64_t v, ValueWidth w) {
    if (w == ValueWidth::bits64) {
        std::memcpy(base + 8 * i, &v, 8);
    } else {
        const auto v32 = static_cast<std::uint32_t>(v);
        std::memcpy(base + 4 * i, &v32, 4);
    }
}

void append_value(std::vector<std::byte>& out, std::uint64_t v, ValueWidth w) {
    ByteWriter wr(out);
    if (w == ValueWidth::bits64) {
        wr.put<std::uint64_t>(v);
    } else {
        wr.put<std::uint32_t>(static_cast<std::uint32_t>(v));
    }
}

} // namespace

RangerIndex RangerIndex::build(const SeedTable& input, const BuildOptions& options, rqrmi::TrainLog* log) {
    const SeedTable capped = options.max_positions ? input.without_frequent(*options.max_positions) : SeedTable{};
    const SeedTable& table = options.max_positions ? capped : input;
    if (table.empty()) {
        throw BuildError("no seeds to index");
    }
    check_k(table.k());
    const ValueWidth vw = options.value_width;
    if (vw != ValueWidth::bits32 && vw != ValueWidth::bits64) {
        throw ParameterError("value width must be 32 or 64");
    }
    if (vw == ValueWidth::bits32 && table.sequence_count() > 1) {
        throw BuildError("32-bit values support single-sequence references only");
    }
    const std::uint64_t max_offset = vw == ValueWidth::bits64 ? ~std::uint64_t{0} : 0xFFFFFFFFu;

    RangerIndex idx;
    idx.header_ = {table.k(), options.w, vw, table.size(), 0};
    idx.stride_ = bucket_bytes(vw);

    std::vector<std::byte> bucket(idx.stride_);
    std::array<std::uint16_t, kBucketSlots> hashes{};
    std::size_t fill = 0;
    auto flush = [&] {
        std::memcpy(bucket.data(), hashes.data(), kHashBlockBytes);
        idx.buckets_.insert(idx.buckets_.end(), bucket.begin(), bucket.end());
        std::fill(bucket.begin(), bucket.end(), std::byte{0});
        hashes.fill(0);
        fill = 0;
    };

    for (std::size_t i = 0; i < table.size(); ++i) {
        const EntryView e = table.entry(i);
        const std::uint16_t h = hash15(e.key.value);
        const bool collides = std::any_of(hashes.begin(), hashes.begin() + static_cast<std::ptrdiff_t>(fill),
                                          [h](std::uint16_t s) { return (s & kHashMask) == h; });
        if (fill == kBucketSlots || (fill > 0 && collides)) {
            flush();
        }
        if (fill == 0) {
            idx.lower_bounds_.push_back(e.key.value);
        }
        std::uint64_t value;
        if (e.singleton()) {
            hashes[fill] = h;
            value = pack_position(e.positions[0], vw);
        } else {
            hashes[fill] = h | kNonSingletonFlag;
            value = idx.position_records();
            if (value + e.positions.size() + 1 > max_offset) {
                throw BuildError("position store exceeds the value width");
            }
            append_value(idx.positions_, e.positions.size(), vw);
            for (const Position& p : e.positions) {
                append_value(idx.positions_, pack_position(p, vw), vw);
            }
        }
        write_value(bucket.data() + kHashBlockBytes, fill, value, vw);
        ++fill;
    }
    flush();
    idx.header_.bucket_count = idx.lower_bounds_.size();
    idx.model_ = rqrmi::train(idx.lower_bounds_, table.k(), options.model, log);
    return idx;
}

RangeWindow RangerIndex::locate(std::uint64_t key) const noexcept {
    const rqrmi::Inference inf = model_.infer(key);
    const auto last = static_cast<std::int64_t>(lower_bounds_.size()) - 1;
    const std::int64_t lo = std::max<std::int64_t>(0, inf.estimate - inf.error);
    const std::int64_t hi = std::min<std::int64_t>(last, inf.estimate + inf.error);
    return {inf.estimate, inf.error, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

RangeSearch RangerIndex::search(std::uint64_t key, const RangeWindow& window) const noexcept {
    RangeSearch r;
    if (key < lower_bounds_.front()) {
        return r;
    }
    // invariant: lower_bounds_[lo] <= key, answer in [lo, hi]
    std::size_t lo = window.lo;
    std::size_t hi = window.hi;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        ++r.steps;
        if (lower_bounds_[mid] <= key) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    r.found = true;
    r.bucket = lo;
    return r;
}

void RangerIndex::fetch(std::size_t bucket, int slot, std::vector<Position>& out) const {
    const auto s = static_cast<std::size_t>(slot);
    const std::uint64_t v = bucket_value(bucket, s);
    const ValueWidth vw = header_.value_width;
    if ((bucket_hashes(bucket)[s] & kNonSingletonFlag) == 0) {
        out.push_back(unpack_position(v, vw));
        return;
    }
    const std::uint64_t count = position_record(v);
    for (std::uint64_t i = 1; i <= count; ++i) {
        out.push_back(unpack_position(position_record(v + i), vw));
    }
}

LookupResult RangerIndex::lookup(Key64 key) const {
    if (key.k != header_.k) {
        throw ParameterError("query k=" + std::to_string(key.k) + " does not match index k=" + std::to_string(header_.k));
    }
    const RangeSearch s = search(key.value, locate(key.value));
    if (!s.found) {
        return std::nullopt;
    }
    const int slot = probe(s.bucket, key.value);
    if (slot < 0) {
        return std::nullopt;
    }
    std::vector<Position> out;
    fetch(s.bucket, slot, out);
    return out;
}

void RangerIndex::check_position_store() const {
    const std::size_t records = position_records();
    for (std::size_t b = 0; b < bucket_count(); ++b) {
        const std::uint16_t* h = bucket_hashes(b);
        for (std::size_t s = 0; s < kBucketSlots; ++s) {
            if (h[s] == 0 || (h[s] & kNonSingletonFlag) == 0) {
                continue;
            }
            const std::uint64_t off = bucket_value(b, s);
            if (off >= records || position_record(off) < 2 || position_record(off) > records - off - 1) {
                throw FormatError(FormatFault::bad_layout, "bucket " + std::to_string(b) + " slot " + std::to_string(s) +
                                                               ": position list out of bounds");
            }
        }
    }
}

std::vector<std::string> RangerIndex::structural_violations() const {
    std::vector<std::string> v;
    auto report = [&](std::string msg) {
        if (v.size() < 64) {
            v.push_back(std::move(msg));
        }
    };
    if (header_.bucket_count != lower_bounds_.size()) {
        report("bucket count differs from range count");
    }
    for (std::size_t i = 1; i < lower_bounds_.size(); ++i) {
        if (lower_bounds_[i] <= lower_bounds_[i - 1]) {
            report("range lower bounds not strictly increasing at " + std::to_string(i));
        }
    }
    std::uint64_t valid = 0;
    for (std::size_t b = 0; b < bucket_count(); ++b) {
        const std::uint16_t* h = bucket_hashes(b);
        bool ended = false;
        for (std::size_t s = 0; s < kBucketSlots; ++s) {
            if (h[s] == 0) {
                ended = true;
                continue;
            }
            if (ended) {
                report("bucket " + std::to_string(b) + ": valid slot " + std::to_string(s) + " after an invalid slot");
            }
            if ((h[s] & kHashMask) == 0) {
                report("bucket " + std::to_string(b) + ": zero hash with flag set at slot " + std::to_string(s));
            }
            ++valid;
            for (std::size_t t = 0; t < s; ++t) {
                if (h[t] != 0 && (h[t] & kHashMask) == (h[s] & kHashMask)) {
                    report("bucket " + std::to_string(b) + ": duplicate hash in slots " + std::to_string(t) + " and " +
                           std::to_string(s));
                }
            }
        }
        if (h[0] == 0) {
            report("bucket " + std::to_string(b) + " is empty");
        }
    }
    if (valid != header_.entry_count) {
        report("valid slot count " + std::to_string(valid) + " differs from entry count " +
               std::to_string(header_.entry_count));
    }
    try {
        check_position_store();
    } catch (const FormatError& e) {
        report(e.what());
    }
    return v;
}

std::vector<LookupResult> batch_lookup_serial(const RangerIndex& index, std::span<const Key64> keys) {
    std::vector<LookupResult> out;
    out.reserve(keys.size());
    for (const Key64& k : keys) {
        out.push_back(index.lookup(k));
    }
    return out;
}

std::vector<LookupResult> batch_lookup(const RangerIndex& index, std::span<const Key64> keys, int threads) {
    for (const Key64& k : keys) {
        if (k.k != index.header().k) {
            throw ParameterError("query k=" + std::to_string(k.k) + " does not match index k=" +
                                 std::to_string(index.header().k));
        }
    }
    std::vector<LookupResult> out(keys.size());
    const auto n = static_cast<std::ptrdiff_t>(keys.size());
    if (threads <= 0) {
#pragma omp parallel for schedule(static, 256)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = index.lookup(keys[static_cast<std::size_t>(i)]);
        }
    } else {
#pragma omp parallel for schedule(static, 256) num_threads(threads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = index.lookup(keys[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

} // namespace ranger
