#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ranger {

inline constexpr unsigned kMaxK = 32;

/// A k-mer packed 2 bits per base (A=0, C=1, G=2, T=3), first base most significant.
/// Right-aligned: value < 4^k, so numeric order equals lexicographic order.
struct Key64 {
    std::uint64_t value = 0;
    std::uint8_t k = 0;

    friend constexpr auto operator<=>(const Key64&, const Key64&) = default;
};

constexpr std::uint64_t key_mask(unsigned k) noexcept {
    return k >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * k)) - 1;
}

/// 0..3 for ACGT (either case), 4 for anything else.
inline std::uint8_t base_code(char c) noexcept {
    switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: return 4;
    }
}

void check_k(unsigned k);

Key64 encode_kmer(std::string_view seq, unsigned k);
std::string decode_kmer(Key64 key);

/// Reverse complement under A<->T, C<->G. Involution.
Key64 revcomp(Key64 key);

/// Unchecked variant for hot loops; `value` must already be < 4^k.
constexpr std::uint64_t revcomp_value(std::uint64_t value, unsigned k) noexcept {
    std::uint64_t x = ~value;
    // reverse the 2-bit groups of the full word
    x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
    x = ((x >> 8) & 0x00FF00FF00FF00FFULL) | ((x & 0x00FF00FF00FF00FFULL) << 8);
    x = ((x >> 16) & 0x0000FFFF0000FFFFULL) | ((x & 0x0000FFFF0000FFFFULL) << 16);
    x = (x >> 32) | (x << 32);
    return x >> (64 - 2 * k);
}

} // namespace ranger
