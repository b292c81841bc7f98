// Index file layout (little-endian):
//   "RGRX" | u16 version | u8 k | u8 w | u8 value_width | u8[3] reserved
//   u64 entry_count | u64 bucket_count
//   4 x (u32 id | u64 offset | u64 length) for MODEL, RANGES, BUCKETS, POSITIONS
//   sections, each starting on a 64-byte boundary, zero padding in between
//   u32 CRC32 over every byte from the first section to the end of the last
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "ranger/bytes.hpp"
#include "ranger/errors.hpp"
#include "ranger/rangeindex.hpp"

namespace ranger {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'G', 'R', 'X'};
constexpr std::size_t kFixedHeader = 28;
constexpr std::size_t kSectionCount = 4;
constexpr std::size_t kTableBytes = kSectionCount * 20;

enum SectionId : std::uint32_t { model_section = 1, ranges_section = 2, buckets_section = 3, positions_section = 4 };

struct Section {
    std::uint32_t id;
    std::uint64_t offset;
    std::uint64_t length;
};

std::size_t align_up(std::size_t v) { return (v + kCacheLine - 1) / kCacheLine * kCacheLine; }

std::uint32_t crc32_of(std::span<const std::byte> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
    std::size_t left = bytes.size();
    while (left > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
        crc = ::crc32(crc, p, chunk);
        p += chunk;
        left -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

} // namespace

std::vector<std::byte> RangerIndex::serialize() const {
    std::vector<std::byte> model_blob;
    model_.append_blob(model_blob);

    std::array<Section, kSectionCount> sections{};
    std::size_t cursor = align_up(kFixedHeader + kTableBytes);
    const std::array<std::uint64_t, kSectionCount> lengths{model_blob.size(), lower_bounds_.size() * 8,
                                                           buckets_.size(), positions_.size()};
    for (std::size_t i = 0; i < kSectionCount; ++i) {
        sections[i] = {static_cast<std::uint32_t>(i + 1), cursor, lengths[i]};
        cursor = align_up(cursor + lengths[i]);
    }

    std::vector<std::byte> out;
    out.reserve(cursor + 4);
    ByteWriter w(out);
    for (char c : kMagic) {
        w.put<char>(c);
    }
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(header_.k));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(header_.w));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(header_.value_width));
    for (int i = 0; i < 3; ++i) {
        w.put<std::uint8_t>(0);
    }
    w.put<std::uint64_t>(header_.entry_count);
    w.put<std::uint64_t>(header_.bucket_count);
    for (const Section& s : sections) {
        w.put<std::uint32_t>(s.id);
        w.put<std::uint64_t>(s.offset);
        w.put<std::uint64_t>(s.length);
    }

    const std::size_t payload_start = sections[0].offset;
    w.pad_to(kCacheLine);
    w.put_bytes(model_blob);
    w.pad_to(kCacheLine);
    for (std::uint64_t b : lower_bounds_) {
        w.put<std::uint64_t>(b);
    }
    w.pad_to(kCacheLine);
    w.put_bytes(buckets_);
    w.pad_to(kCacheLine);
    w.put_bytes(positions_);
    const std::size_t payload_end = out.size();
    w.put<std::uint32_t>(crc32_of(std::span<const std::byte>(out).subspan(payload_start, payload_end - payload_start)));
    return out;
}

RangerIndex RangerIndex::deserialize(std::span<const std::byte> bytes, DeserializeOptions options) {
    if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError(FormatFault::bad_magic, "not a ranger index (bad magic)");
    }
    ByteReader r(bytes, "index header");
    r.take(kMagic.size());
    const auto version = r.get<std::uint16_t>();
    if (version != kFormatVersion) {
        throw FormatError(FormatFault::bad_version, "unsupported index format version " + std::to_string(version));
    }
    RangerIndex idx;
    idx.header_.k = r.get<std::uint8_t>();
    idx.header_.w = r.get<std::uint8_t>();
    const auto vw = r.get<std::uint8_t>();
    for (int i = 0; i < 3; ++i) {
        if (r.get<std::uint8_t>() != 0) {
            throw FormatError(FormatFault::bad_layout, "reserved header bytes must be zero");
        }
    }
    idx.header_.entry_count = r.get<std::uint64_t>();
    idx.header_.bucket_count = r.get<std::uint64_t>();
    if (idx.header_.k < 1 || idx.header_.k > kMaxK) {
        throw FormatError(FormatFault::bad_layout, "k out of range in header");
    }
    if (vw != 32 && vw != 64) {
        throw FormatError(FormatFault::bad_layout, "value width must be 32 or 64");
    }
    idx.header_.value_width = static_cast<ValueWidth>(vw);
    idx.stride_ = bucket_bytes(idx.header_.value_width);

    std::array<Section, kSectionCount> sections{};
    for (Section& s : sections) {
        s.id = r.get<std::uint32_t>();
        s.offset = r.get<std::uint64_t>();
        s.length = r.get<std::uint64_t>();
    }

    // section table must describe exactly the canonical layout
    std::size_t cursor = align_up(kFixedHeader + kTableBytes);
    for (std::size_t i = 0; i < kSectionCount; ++i) {
        const Section& s = sections[i];
        if (s.id != i + 1 || s.offset != cursor || s.length > bytes.size()) {
            throw FormatError(FormatFault::bad_layout, "malformed section table entry " + std::to_string(i));
        }
        cursor = align_up(cursor + s.length);
    }
    const std::size_t payload_end = sections.back().offset + sections.back().length;
    if (bytes.size() < payload_end + 4) {
        throw FormatError(FormatFault::truncated, "index file truncated");
    }
    if (bytes.size() != payload_end + 4) {
        throw FormatError(FormatFault::bad_layout, "trailing bytes after index checksum");
    }
    std::size_t gap = kFixedHeader + kTableBytes;
    for (const Section& s : sections) {
        for (std::size_t p = gap; p < s.offset; ++p) {
            if (bytes[p] != std::byte{0}) {
                throw FormatError(FormatFault::bad_layout, "non-zero padding at byte " + std::to_string(p));
            }
        }
        gap = s.offset + s.length;
    }

    if (options.verify_checksum) {
        std::uint32_t stored;
        std::memcpy(&stored, bytes.data() + payload_end, 4);
        const std::size_t start = sections[0].offset;
        if (crc32_of(bytes.subspan(start, payload_end - start)) != stored) {
            throw FormatError(FormatFault::bad_checksum, "index checksum mismatch");
        }
    }

    const std::uint64_t buckets = idx.header_.bucket_count;
    const Section& ranges = sections[ranges_section - 1];
    const Section& bucket_sec = sections[buckets_section - 1];
    const Section& pos_sec = sections[positions_section - 1];
    if (buckets == 0 || ranges.length != buckets * 8 || bucket_sec.length != buckets * idx.stride_) {
        throw FormatError(FormatFault::bad_layout, "range/bucket section length does not match bucket count");
    }
    if (pos_sec.length % value_bytes(idx.header_.value_width) != 0) {
        throw FormatError(FormatFault::bad_layout, "position section length not a multiple of the value width");
    }
    if (idx.header_.entry_count > buckets * kBucketSlots || idx.header_.entry_count < buckets) {
        throw FormatError(FormatFault::bad_layout, "entry count inconsistent with bucket count");
    }

    const Section& model_sec = sections[model_section - 1];
    idx.model_ = RqrmiModel::from_blob(bytes.subspan(model_sec.offset, model_sec.length));
    if (idx.model_.range_count() != buckets) {
        throw FormatError(FormatFault::bad_model, "model range count does not match bucket count");
    }
    if (idx.model_.input_scale() != std::ldexp(1.0, -2 * static_cast<int>(idx.header_.k))) {
        throw FormatError(FormatFault::bad_model, "model normalization does not match k");
    }

    idx.lower_bounds_.resize(buckets);
    std::memcpy(idx.lower_bounds_.data(), bytes.data() + ranges.offset, ranges.length);
    for (std::size_t i = 1; i < idx.lower_bounds_.size(); ++i) {
        if (idx.lower_bounds_[i] <= idx.lower_bounds_[i - 1]) {
            throw FormatError(FormatFault::non_monotonic_ranges,
                              "range lower bounds not strictly increasing at index " + std::to_string(i));
        }
    }
    if (idx.lower_bounds_.back() > key_mask(idx.header_.k)) {
        throw FormatError(FormatFault::bad_layout, "range lower bound outside the k-mer domain");
    }

    const auto* bb = bytes.data() + bucket_sec.offset;
    idx.buckets_.assign(bb, bb + bucket_sec.length);
    const auto* pb = bytes.data() + pos_sec.offset;
    idx.positions_.assign(pb, pb + pos_sec.length);
    idx.check_position_store();
    return idx;
}

void RangerIndex::save(const std::filesystem::path& path) const {
    const std::vector<std::byte> bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failure on '" + path.string() + "'");
    }
}

RangerIndex RangerIndex::load(const std::filesystem::path& path, DeserializeOptions options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open index file '" + path.string() + "'");
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    return deserialize(std::as_bytes(std::span<const char>(raw)), options);
}

} // namespace ranger
