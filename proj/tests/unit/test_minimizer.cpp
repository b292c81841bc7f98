#include <random>

#include "doctest.h"
#include "ranger/errors.hpp"
#include "ranger/minimizer.hpp"
#include "support.hpp"

using namespace ranger;

TEST_CASE("homopolymer: rightmost tie per window, repeats collapsed") {
    const auto hits = extract_minimizers("AAAAAA", 3, 2);
    REQUIRE(hits == testing::brute_force_minimizers("AAAAAA", 3, 2));
    REQUIRE(hits.size() == 3);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].key == encode_kmer("AAA", 3));
        CHECK(hits[i].offset == i + 1);
        CHECK(hits[i].strand == Strand::forward);
    }
}

TEST_CASE("w = 1 yields one minimizer per valid k-mer") {
    const std::string s = testing::random_bases(500, 3);
    const auto hits = extract_minimizers(s, 11, 1);
    REQUIRE(hits.size() == s.size() - 11 + 1);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const Key64 f = encode_kmer(s.substr(i, 11), 11);
        const Key64 r = revcomp(f);
        CHECK(hits[i].offset == i);
        CHECK(hits[i].key.value == std::min(f.value, r.value));
        CHECK(hits[i].strand == (r.value < f.value ? Strand::reverse : Strand::forward));
    }
}

TEST_CASE("short sequences and bad parameters") {
    CHECK(extract_minimizers("ACG", 5, 3).empty());
    CHECK_THROWS_AS(extract_minimizers("ACGT", 33, 3), ParameterError);
    CHECK_THROWS_AS(extract_minimizers("ACGT", 3, 0), ParameterError);
    CHECK(extract_minimizers(std::string(100, 'N'), 5, 3).empty());
}

TEST_CASE("random 10 kbp sequences match the brute-force scanner") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const std::string s = testing::random_bases(10000, seed);
        CHECK(extract_minimizers(s, 15, 10) == testing::brute_force_minimizers(s, 15, 10));
        CHECK(extract_minimizers(s, 28, 11) == testing::brute_force_minimizers(s, 28, 11));
        CHECK(extract_minimizers(s, 32, 5) == testing::brute_force_minimizers(s, 32, 5));
    }
}

TEST_CASE("non-ACGT bases reset the window") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::string s = testing::random_bases(3000, rng());
        for (int n = 0; n < 15; ++n) {
            const std::size_t at = rng() % s.size();
            const std::size_t len = 1 + rng() % 30;
            for (std::size_t i = at; i < std::min(s.size(), at + len); ++i) {
                s[i] = "NRYK"[rng() % 4];
            }
        }
        const unsigned k = 5 + static_cast<unsigned>(rng() % 20);
        const unsigned w = 1 + static_cast<unsigned>(rng() % 15);
        REQUIRE(extract_minimizers(s, k, w) == testing::brute_force_minimizers(s, k, w));
    }
}

TEST_CASE("coverage and dedup properties") {
    const std::string s = testing::random_bases(5000, 99);
    const unsigned k = 9;
    const unsigned w = 7;
    const auto hits = extract_minimizers(s, k, w);
    for (std::size_t i = 1; i < hits.size(); ++i) {
        CHECK_FALSE(hits[i] == hits[i - 1]);
        CHECK(hits[i].offset >= hits[i - 1].offset);
    }
    for (std::size_t start = 0; start + w + k - 1 <= s.size(); ++start) {
        std::uint64_t best = ~std::uint64_t{0};
        for (std::size_t p = start; p < start + w; ++p) {
            const Key64 f = encode_kmer(s.substr(p, k), k);
            best = std::min({best, f.value, revcomp(f).value});
        }
        const bool covered = std::any_of(hits.begin(), hits.end(), [&](const MinimizerHit& h) {
            return h.offset >= start && h.offset < start + w && h.key.value == best;
        });
        REQUIRE(covered);
    }
}
