#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <new>
#include <vector>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "ranger/minimizer.hpp"

namespace ranger {

inline constexpr std::size_t kBucketSlots = 32;
inline constexpr std::size_t kCacheLine = 64;
inline constexpr std::size_t kHashBlockBytes = kBucketSlots * sizeof(std::uint16_t);
inline constexpr std::uint16_t kNonSingletonFlag = 0x8000;
inline constexpr std::uint16_t kHashMask = 0x7FFF;

static_assert(kHashBlockBytes == kCacheLine);

enum class ValueWidth : std::uint8_t { bits32 = 32, bits64 = 64 };

constexpr std::size_t value_bytes(ValueWidth w) noexcept { return w == ValueWidth::bits64 ? 8 : 4; }

/// 64 bytes of hash slots followed by 32 values: 320 B (64-bit) or 192 B (32-bit).
constexpr std::size_t bucket_bytes(ValueWidth w) noexcept { return kHashBlockBytes + kBucketSlots * value_bytes(w); }

/// Top 15 bits of a Fibonacci multiplicative hash; 0 is reserved for empty slots.
constexpr std::uint16_t hash15(std::uint64_t key) noexcept {
    const auto h = static_cast<std::uint16_t>((key * 0x9E3779B97F4A7C15ULL) >> 49);
    return h == 0 ? 1 : h;
}

/// 64-bit: seq (31) | offset (32) | strand (1). 32-bit: offset (31) | strand (1).
/// Throws BuildError when the position does not fit the width.
std::uint64_t pack_position(const Position& p, ValueWidth w);
Position unpack_position(std::uint64_t v, ValueWidth w) noexcept;

/// Index of the valid slot whose 15-bit hash equals `h`, or -1.
/// Compares all 32 lanes at once; `slots` must be 64-byte aligned.
inline int probe_hashes(const std::uint16_t* slots, std::uint16_t h) noexcept {
    std::uint32_t hit = 0;
#if defined(__SSE2__)
    const __m128i key = _mm_set1_epi16(static_cast<short>(h));
    const __m128i mask = _mm_set1_epi16(static_cast<short>(kHashMask));
    const auto* v = reinterpret_cast<const __m128i*>(slots);
    auto eq = [&](int i) { return _mm_cmpeq_epi16(_mm_and_si128(_mm_load_si128(v + i), mask), key); };
    // packs turns each 0xFFFF lane into one 0xFF byte
    hit = static_cast<std::uint32_t>(_mm_movemask_epi8(_mm_packs_epi16(eq(0), eq(1)))) |
          static_cast<std::uint32_t>(_mm_movemask_epi8(_mm_packs_epi16(eq(2), eq(3)))) << 16;
#else
#pragma omp simd reduction(| : hit)
    for (std::uint32_t i = 0; i < kBucketSlots; ++i) {
        hit |= static_cast<std::uint32_t>((slots[i] & kHashMask) == h) << i;
    }
#endif
    return hit == 0 ? -1 : std::countr_zero(hit);
}

/// Slot-by-slot reference for probe_hashes; stops at the first invalid slot.
inline int probe_hashes_serial(const std::uint16_t* slots, std::uint16_t h) noexcept {
    for (std::size_t i = 0; i < kBucketSlots && slots[i] != 0; ++i) {
        if ((slots[i] & kHashMask) == h) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

template <class T, std::size_t Align = kCacheLine>
struct AlignedAllocator {
    using value_type = T;

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align})); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Align}); }

    template <class U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };
    friend bool operator==(const AlignedAllocator&, const AlignedAllocator&) noexcept { return true; }
};

using AlignedBytes = std::vector<std::byte, AlignedAllocator<std::byte>>;

} // namespace ranger
