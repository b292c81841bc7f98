#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "ranger/errors.hpp"

using namespace ranger;

namespace {

FormatFault fault_of(const std::vector<std::byte>& bytes, DeserializeOptions o = {}) {
    try {
        RangerIndex::deserialize(bytes, o);
    } catch (const FormatError& e) {
        return e.fault();
    }
    FAIL("expected FormatError");
    return FormatFault::bad_layout;
}

} // namespace

TEST_CASE("round trip is byte exact and preserves lookups") {
    const SeedTable t = testing::random_table(100'000, 3);
    for (ValueWidth vw : {ValueWidth::bits32, ValueWidth::bits64}) {
        const RangerIndex idx = testing::small_index(t, vw);
        const auto bytes = idx.serialize();
        const RangerIndex back = RangerIndex::deserialize(bytes);
        CHECK(back.serialize() == bytes);
        CHECK(back.header() == idx.header());
        CHECK(back.model() == idx.model());
        CHECK(testing::section(bytes, 2).second == idx.bucket_count() * (vw == ValueWidth::bits64 ? 320 : 192));
        for (std::size_t s = 0; s < 4; ++s) {
            CHECK(testing::section(bytes, s).first % 64 == 0);
        }
        for (std::size_t i = 0; i < t.size(); i += 7) {
            REQUIRE(back.lookup(t.entry(i).key) == idx.lookup(t.entry(i).key));
        }
    }
}

TEST_CASE("save and load") {
    const RangerIndex idx = testing::small_index(testing::random_table(20'000, 4));
    const auto path = std::filesystem::temp_directory_path() / "ranger_serialize_test.rgx";
    idx.save(path);
    CHECK(RangerIndex::load(path).serialize() == idx.serialize());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(RangerIndex::load(path), IoError);
}

TEST_CASE("corruption is detected") {
    const RangerIndex idx = testing::small_index(testing::random_table(20'000, 4));
    const auto good = idx.serialize();

    auto flipped = good;
    const auto [boff, blen] = testing::section(good, 2);
    flipped[boff + blen / 2] ^= std::byte{0x10};
    CHECK(fault_of(flipped) == FormatFault::bad_checksum);

    auto magic = good;
    magic[0] = std::byte{'X'};
    CHECK(fault_of(magic) == FormatFault::bad_magic);

    auto version = good;
    version[4] = std::byte{2};
    CHECK(fault_of(version) == FormatFault::bad_version);

    CHECK(fault_of(std::vector<std::byte>(good.begin(), good.begin() + 10)) == FormatFault::truncated);
    CHECK(fault_of(std::vector<std::byte>(good.begin(), good.end() - 100)) == FormatFault::truncated);

    auto ranges = good;
    const auto [roff, rlen] = testing::section(good, 1);
    REQUIRE(rlen >= 16);
    std::memcpy(ranges.data() + roff + 8, ranges.data() + roff, 8); // second bound := first
    CHECK(fault_of(ranges) == FormatFault::bad_checksum);
    CHECK(fault_of(ranges, {false}) == FormatFault::non_monotonic_ranges);
}

TEST_CASE("bucket corruption with the checksum skipped shows as a structural violation") {
    const RangerIndex idx = testing::small_index(testing::random_table(20'000, 4));
    auto bytes = idx.serialize();
    const auto [boff, blen] = testing::section(bytes, 2);
    REQUIRE(blen >= 320);
    // duplicate slot 0's hash into slot 1 of the first bucket
    std::memcpy(bytes.data() + boff + 2, bytes.data() + boff, 2);
    const RangerIndex bad = RangerIndex::deserialize(bytes, {false});
    CHECK_FALSE(bad.structural_violations().empty());
}
