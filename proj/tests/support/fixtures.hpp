#pragma once

#include <cstring>

#include "ranger/rangeindex.hpp"
#include "ranger/seeds.hpp"
#include "support.hpp"

namespace ranger::testing {

inline rqrmi::TrainConfig fast_model() {
    rqrmi::TrainConfig c;
    c.stage_widths = {1, 4};
    c.epochs = 40;
    c.samples_per_net = 2048;
    c.max_trials = 1;
    return c;
}

inline SeedTable random_table(std::size_t bases, std::uint64_t seed, unsigned k = 15, unsigned w = 10,
                              std::size_t sequences = 1) {
    std::vector<RefSequence> refs;
    for (std::size_t i = 0; i < sequences; ++i) {
        refs.push_back({static_cast<std::uint32_t>(i), "s" + std::to_string(i), random_bases(bases, seed + i)});
    }
    return SeedTable::from_sequences(refs, k, w);
}

inline RangerIndex small_index(const SeedTable& t, ValueWidth vw = ValueWidth::bits64) {
    BuildOptions o;
    o.w = 10;
    o.value_width = vw;
    o.model = fast_model();
    return RangerIndex::build(t, o);
}

// section table entry i of a serialized index: {offset, length}
inline std::pair<std::uint64_t, std::uint64_t> section(const std::vector<std::byte>& bytes, std::size_t i) {
    std::uint64_t off;
    std::uint64_t len;
    std::memcpy(&off, bytes.data() + 28 + 20 * i + 4, 8);
    std::memcpy(&len, bytes.data() + 28 + 20 * i + 12, 8);
    return {off, len};
}

} // namespace ranger::testing
