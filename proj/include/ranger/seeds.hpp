#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ranger/fasta.hpp"
#include "ranger/minimizer.hpp"

namespace ranger {

/// A key with its sorted, duplicate-free position list.
struct MinimizerEntry {
    Key64 key;
    std::vector<Position> positions;

    bool singleton() const noexcept { return positions.size() == 1; }
};

/// Non-owning view of one row of a SeedTable.
struct EntryView {
    Key64 key;
    std::span<const Position> positions;

    bool singleton() const noexcept { return positions.size() == 1; }
};

/// Sorted, unique-key seed table in compressed-row form.
class SeedTable {
public:
    SeedTable() = default;

    /// Extracts (k,w)-minimizers from every sequence and groups them by key.
    static SeedTable from_sequences(std::span<const RefSequence> refs, unsigned k, unsigned w);

    /// Validates and packs explicit entries: one k, keys strictly increasing,
    /// non-empty strictly increasing position lists.
    static SeedTable from_entries(std::span<const MinimizerEntry> entries);

    unsigned k() const noexcept { return k_; }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }
    std::size_t occurrences() const noexcept { return positions_.size(); }
    std::size_t singletons() const noexcept;
    std::size_t max_positions() const noexcept;
    std::uint32_t sequence_count() const noexcept;

    std::span<const std::uint64_t> keys() const noexcept { return keys_; }
    EntryView entry(std::size_t i) const noexcept {
        return {{keys_[i], static_cast<std::uint8_t>(k_)},
                std::span<const Position>(positions_).subspan(starts_[i], starts_[i + 1] - starts_[i])};
    }

    /// Copy without entries having more than `cap` positions.
    SeedTable without_frequent(std::size_t cap) const;

private:
    unsigned k_ = 0;
    std::vector<std::uint64_t> keys_;
    std::vector<std::size_t> starts_{0};
    std::vector<Position> positions_;
};

} // namespace ranger
