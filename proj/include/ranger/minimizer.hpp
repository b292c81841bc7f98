#pragma once

#include <compare>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ranger/fasta.hpp"
#include "ranger/keycodec.hpp"

namespace ranger {

enum class Strand : std::uint8_t { forward = 0, reverse = 1 };

/// A reference location. Ordered by (seq, offset, strand).
struct Position {
    std::uint32_t seq = 0;
    std::uint32_t offset = 0;
    Strand strand = Strand::forward;

    friend constexpr auto operator<=>(const Position&, const Position&) = default;
};

struct MinimizerHit {
    Key64 key;
    std::uint32_t offset = 0; // start of the k-mer
    Strand strand = Strand::forward;

    friend constexpr bool operator==(const MinimizerHit&, const MinimizerHit&) = default;
};

/// Canonical (k,w)-minimizers of `bases`.
///
/// The canonical key of a k-mer is min(forward, reverse complement); ties go to
/// the forward strand. Within a window of w consecutive valid k-mers the minimum
/// key wins and equal minima resolve to the rightmost k-mer. A selection equal
/// to the previous emitted (key, offset) is not repeated. Any non-ACGT base
/// invalidates the k-mers covering it and restarts the window after it.
std::vector<MinimizerHit> extract_minimizers(std::string_view bases, unsigned k, unsigned w);

inline std::vector<MinimizerHit> extract_minimizers(const RefSequence& seq, unsigned k, unsigned w) {
    return extract_minimizers(std::string_view(seq.bases), k, w);
}

} // namespace ranger
