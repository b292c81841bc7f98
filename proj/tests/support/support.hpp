#pragma once

// Test-only helpers. The oracles here deliberately avoid the library's code paths.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ranger/minimizer.hpp"

namespace ranger::testing {

inline std::string random_bases(std::size_t n, std::uint64_t seed) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::mt19937_64 rng(seed);
    std::string s(n, 'A');
    for (std::size_t i = 0; i < n; i += 32) {
        std::uint64_t bits = rng();
        for (std::size_t j = i; j < std::min(n, i + 32); ++j) {
            s[j] = kBases[bits & 3];
            bits >>= 2;
        }
    }
    return s;
}

inline std::string string_revcomp(std::string_view s) {
    std::string out(s.rbegin(), s.rend());
    for (char& c : out) {
        switch (c) {
        case 'A': c = 'T'; break;
        case 'C': c = 'G'; break;
        case 'G': c = 'C'; break;
        case 'T': c = 'A'; break;
        default: break;
        }
    }
    return out;
}

inline std::uint64_t string_to_value(std::string_view s) {
    std::uint64_t v = 0;
    for (char c : s) {
        v = v * 4 + static_cast<std::uint64_t>(std::string_view("ACGT").find(c));
    }
    return v;
}

/// O(n*w) minimizer scan on strings: canonical = lexicographic min of the
/// k-mer and its reverse complement (forward on ties), rightmost minimum per
/// window, windows overlapping a non-ACGT base skipped, consecutive repeats of
/// the same (key, offset) collapsed.
inline std::vector<MinimizerHit> brute_force_minimizers(std::string_view seq, unsigned k, unsigned w) {
    std::vector<MinimizerHit> out;
    if (seq.size() < k + w - 1) {
        return out;
    }
    auto clean = [&](std::size_t from, std::size_t len) {
        return std::all_of(seq.begin() + static_cast<std::ptrdiff_t>(from),
                           seq.begin() + static_cast<std::ptrdiff_t>(from + len),
                           [](char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; });
    };
    for (std::size_t start = 0; start + w + k - 1 <= seq.size(); ++start) {
        if (!clean(start, w + k - 1)) {
            continue;
        }
        std::string best;
        std::size_t best_pos = 0;
        Strand best_strand = Strand::forward;
        for (std::size_t p = start; p < start + w; ++p) {
            const std::string fwd(seq.substr(p, k));
            const std::string rc = string_revcomp(fwd);
            const bool use_rc = rc < fwd;
            const std::string& can = use_rc ? rc : fwd;
            if (best.empty() || can <= best) {
                best = can;
                best_pos = p;
                best_strand = use_rc ? Strand::reverse : Strand::forward;
            }
        }
        MinimizerHit hit{{string_to_value(best), static_cast<std::uint8_t>(k)}, static_cast<std::uint32_t>(best_pos),
                         best_strand};
        if (out.empty() || out.back().offset != hit.offset || out.back().key != hit.key) {
            out.push_back(hit);
        }
    }
    return out;
}

} // namespace ranger::testing
