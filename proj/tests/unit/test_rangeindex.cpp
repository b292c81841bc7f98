#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "ranger/errors.hpp"
#include "ranger/oracle.hpp"

using namespace ranger;
using testing::small_index;

namespace {

std::vector<MinimizerEntry> singletons(std::span<const std::uint64_t> keys, unsigned k) {
    std::vector<MinimizerEntry> es;
    std::uint32_t off = 0;
    for (std::uint64_t key : keys) {
        es.push_back({{key, static_cast<std::uint8_t>(k)}, {{0, off++, Strand::forward}}});
    }
    return es;
}

} // namespace

TEST_CASE("hash15 examples and range") {
    CHECK(hash15(0) == 1);
    CHECK(hash15(1) == static_cast<std::uint16_t>(0x9E3779B97F4A7C15ULL >> 49));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100000; ++i) {
        const std::uint16_t h = hash15(rng());
        REQUIRE(h >= 1);
        REQUIRE(h <= 0x7FFF);
    }
}

TEST_CASE("hash15 is close to uniform on sequential and random keys") {
    // chi-squared over 256 cells of the top 8 hash bits; 255 dof, critical value 330.5 at p=0.001
    for (int mode = 0; mode < 2; ++mode) {
        std::mt19937_64 rng(77);
        std::array<double, 256> cells{};
        const int n = 1 << 18;
        for (int i = 0; i < n; ++i) {
            const std::uint64_t key = mode == 0 ? static_cast<std::uint64_t>(i) : rng() >> 34;
            cells[hash15(key) >> 7] += 1;
        }
        double chi = 0;
        const double expected = n / 256.0;
        for (double c : cells) chi += (c - expected) * (c - expected) / expected;
        CHECK(chi < 330.5);
    }
}

TEST_CASE("position packing round trips and rejects what does not fit") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10000; ++i) {
        const Position p{static_cast<std::uint32_t>(rng() >> 33), static_cast<std::uint32_t>(rng()),
                         rng() & 1 ? Strand::reverse : Strand::forward};
        REQUIRE(unpack_position(pack_position(p, ValueWidth::bits64), ValueWidth::bits64) == p);
        const Position q{0, static_cast<std::uint32_t>(rng() >> 33), p.strand};
        REQUIRE(unpack_position(pack_position(q, ValueWidth::bits32), ValueWidth::bits32) == q);
    }
    CHECK_THROWS_AS(pack_position({1, 0, Strand::forward}, ValueWidth::bits32), BuildError);
    CHECK_THROWS_AS(pack_position({0, 0x8000'0000u, Strand::forward}, ValueWidth::bits32), BuildError);
}

TEST_CASE("probe_hashes matches the slot-by-slot reference") {
    std::mt19937_64 rng(12);
    alignas(64) std::array<std::uint16_t, kBucketSlots> slots{};
    for (int trial = 0; trial < 20000; ++trial) {
        slots.fill(0);
        const std::size_t fill = rng() % (kBucketSlots + 1);
        for (std::size_t i = 0; i < fill; ++i) {
            std::uint16_t h;
            do {
                h = hash15(rng());
            } while (std::find_if(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(i),
                                  [h](std::uint16_t s) { return (s & kHashMask) == h; }) != slots.begin() + i);
            slots[i] = static_cast<std::uint16_t>(h | (rng() & 1 ? kNonSingletonFlag : 0));
        }
        const std::uint16_t q = fill > 0 && rng() % 2 ? slots[rng() % fill] & kHashMask : hash15(rng());
        REQUIRE(probe_hashes(slots.data(), q) == probe_hashes_serial(slots.data(), q));
    }
}

TEST_CASE("three singletons fill one bucket") {
    const std::vector<std::uint64_t> keys{5, 9, 100};
    const auto t = SeedTable::from_entries(singletons(keys, 8));
    const RangerIndex idx = small_index(t);
    REQUIRE(idx.bucket_count() == 1);
    CHECK(idx.lower_bounds()[0] == 5);
    CHECK(idx.bucket_hashes(0)[3] == 0);
    for (std::uint32_t i = 0; i < 3; ++i) {
        const auto r = idx.lookup({keys[i], 8});
        REQUIRE(r);
        CHECK(*r == std::vector<Position>{{0, i, Strand::forward}});
    }
    CHECK_FALSE(idx.lookup({4, 8}));
    CHECK(idx.structural_violations().empty());
}

TEST_CASE("33 entries split 32 + 1") {
    std::vector<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 33; ++i) keys.push_back(10 + i);
    const RangerIndex idx = small_index(SeedTable::from_entries(singletons(keys, 8)));
    REQUIRE(idx.bucket_count() == 2);
    CHECK(idx.lower_bounds()[1] == 42);
    CHECK(idx.bucket_hashes(1)[1] == 0);
}

TEST_CASE("a hash collision seals the bucket early") {
    // smallest key > 1 sharing key 1's hash
    std::uint64_t twin = 2;
    while (hash15(twin) != hash15(1)) ++twin;
    std::vector<std::uint64_t> keys{1};
    for (std::uint64_t key = 2; keys.size() < 5; ++key) {
        if (key != twin && hash15(key) != hash15(1)) keys.push_back(key);
    }
    keys.push_back(twin);
    std::sort(keys.begin(), keys.end());
    const RangerIndex idx = small_index(SeedTable::from_entries(singletons(keys, 16)));
    REQUIRE(idx.bucket_count() == 2);
    CHECK(idx.lower_bounds()[1] == twin);
    for (std::uint64_t key : keys) {
        CHECK(idx.lookup({key, 16}));
    }
}

TEST_CASE("lookup: completeness, soundness, false positive rate") {
    const SeedTable t = testing::random_table(400'000, 5);
    const RangerIndex idx = small_index(t);
    const ExactMap truth = ExactMap::build(t);
    CHECK(idx.structural_violations().empty());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const EntryView e = t.entry(i);
        const auto r = idx.lookup(e.key);
        REQUIRE(r);
        REQUIRE(std::equal(r->begin(), r->end(), e.positions.begin(), e.positions.end()));
    }
    std::mt19937_64 rng(6);
    std::size_t absent = 0;
    std::size_t fp = 0;
    while (absent < 200'000) {
        const std::uint64_t key = rng() & key_mask(15);
        if (truth.contains(key)) continue;
        ++absent;
        fp += idx.lookup({key, 15}).has_value();
    }
    CHECK(static_cast<double>(fp) / static_cast<double>(absent) < 0.001);
    CHECK_THROWS_AS(idx.lookup({1, 14}), ParameterError);
}

TEST_CASE("keys below the first lower bound are not found") {
    const std::vector<std::uint64_t> keys{1000, 2000};
    const RangerIndex idx = small_index(SeedTable::from_entries(singletons(keys, 10)));
    for (std::uint64_t k = 0; k < 1000; ++k) {
        REQUIRE_FALSE(idx.lookup({k, 10}));
    }
}

TEST_CASE("multi-position entries and 32-bit values") {
    std::vector<RefSequence> refs{{0, "r", testing::random_bases(5000, 9) + testing::random_bases(5000, 9)}};
    const SeedTable t = SeedTable::from_sequences(refs, 13, 6);
    CHECK(t.singletons() < t.size());
    for (ValueWidth vw : {ValueWidth::bits32, ValueWidth::bits64}) {
        const RangerIndex idx = small_index(t, vw);
        CHECK(idx.structural_violations().empty());
        CHECK(idx.bucket_section().size() == idx.bucket_count() * bucket_bytes(vw));
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto r = idx.lookup(t.entry(i).key);
            REQUIRE(r);
            REQUIRE(std::equal(r->begin(), r->end(), t.entry(i).positions.begin(), t.entry(i).positions.end()));
        }
    }
    const SeedTable two = testing::random_table(2000, 1, 13, 6, 2);
    CHECK_THROWS_AS(small_index(two, ValueWidth::bits32), BuildError);
}

TEST_CASE("max_positions drops frequent keys") {
    std::vector<RefSequence> refs{{0, "r", std::string(200, 'A') + testing::random_bases(2000, 2)}};
    const SeedTable t = SeedTable::from_sequences(refs, 11, 5);
    BuildOptions o;
    o.model = testing::fast_model();
    o.max_positions = 3;
    const RangerIndex idx = RangerIndex::build(t, o);
    CHECK_FALSE(idx.lookup(encode_kmer(std::string(11, 'A'), 11)));
    CHECK(idx.header().entry_count < t.size());
}

TEST_CASE("empty tables are rejected") {
    CHECK_THROWS_AS(small_index(SeedTable{}), BuildError);
}

TEST_CASE("batch lookup equals serial reference") {
    const SeedTable t = testing::random_table(200'000, 8);
    const RangerIndex idx = small_index(t);
    CHECK(batch_lookup(idx, {}).empty());
    std::vector<Key64> one{t.entry(0).key};
    CHECK(batch_lookup(idx, one) == batch_lookup_serial(idx, one));
    std::mt19937_64 rng(2);
    std::vector<Key64> keys;
    for (int i = 0; i < 100'000; ++i) {
        keys.push_back(i % 2 ? t.entry(rng() % t.size()).key : Key64{rng() & key_mask(15), 15});
    }
    const auto serial = batch_lookup_serial(idx, keys);
    CHECK(batch_lookup(idx, keys) == serial);
    CHECK(batch_lookup(idx, keys, 3) == serial);
}
