#include "ranger/seeds.hpp"

#include <algorithm>

#include "ranger/errors.hpp"

namespace ranger {

namespace {

struct KeyedPosition {
    std::uint64_t key;
    Position pos;

    friend bool operator<(const KeyedPosition& a, const KeyedPosition& b) {
        return a.key != b.key ? a.key < b.key : a.pos < b.pos;
    }
    friend bool operator==(const KeyedPosition& a, const KeyedPosition& b) {
        return a.key == b.key && a.pos == b.pos;
    }
};

} // namespace

SeedTable SeedTable::from_sequences(std::span<const RefSequence> refs, unsigned k, unsigned w) {
    check_k(k);
    std::vector<KeyedPosition> all;
    for (const RefSequence& ref : refs) {
        for (const MinimizerHit& h : extract_minimizers(ref, k, w)) {
            all.push_back({h.key.value, {ref.id, h.offset, h.strand}});
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    SeedTable t;
    t.k_ = k;
    t.positions_.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (i == 0 || all[i].key != all[i - 1].key) {
            if (i != 0) {
                t.starts_.push_back(t.positions_.size());
            }
            t.keys_.push_back(all[i].key);
        }
        t.positions_.push_back(all[i].pos);
    }
    if (!all.empty()) {
        t.starts_.push_back(t.positions_.size());
    }
    return t;
}

SeedTable SeedTable::from_entries(std::span<const MinimizerEntry> entries) {
    SeedTable t;
    if (entries.empty()) {
        return t;
    }
    t.k_ = entries.front().key.k;
    check_k(t.k_);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const MinimizerEntry& e = entries[i];
        if (e.key.k != t.k_) {
            throw BuildError("mixed k-mer lengths in entry list (entry " + std::to_string(i) + ")");
        }
        if ((e.key.value & ~key_mask(t.k_)) != 0) {
            throw BuildError("malformed key at entry " + std::to_string(i));
        }
        if (i > 0 && e.key.value <= entries[i - 1].key.value) {
            throw BuildError(e.key.value == entries[i - 1].key.value
                                 ? "duplicate key at entry " + std::to_string(i)
                                 : "entries not sorted by key at entry " + std::to_string(i));
        }
        if (e.positions.empty()) {
            throw BuildError("empty position list at entry " + std::to_string(i));
        }
        if (!std::is_sorted(e.positions.begin(), e.positions.end()) ||
            std::adjacent_find(e.positions.begin(), e.positions.end()) != e.positions.end()) {
            throw BuildError("position list not strictly increasing at entry " + std::to_string(i));
        }
        t.keys_.push_back(e.key.value);
        t.positions_.insert(t.positions_.end(), e.positions.begin(), e.positions.end());
        t.starts_.push_back(t.positions_.size());
    }
    return t;
}

std::size_t SeedTable::singletons() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        n += (starts_[i + 1] - starts_[i]) == 1;
    }
    return n;
}

std::size_t SeedTable::max_positions() const noexcept {
    std::size_t m = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        m = std::max(m, starts_[i + 1] - starts_[i]);
    }
    return m;
}

std::uint32_t SeedTable::sequence_count() const noexcept {
    std::uint32_t n = 0;
    for (const Position& p : positions_) {
        n = std::max(n, p.seq + 1);
    }
    return n;
}

SeedTable SeedTable::without_frequent(std::size_t cap) const {
    SeedTable t;
    t.k_ = k_;
    for (std::size_t i = 0; i < size(); ++i) {
        const std::size_t n = starts_[i + 1] - starts_[i];
        if (n > cap) {
            continue;
        }
        t.keys_.push_back(keys_[i]);
        t.positions_.insert(t.positions_.end(), positions_.begin() + static_cast<std::ptrdiff_t>(starts_[i]),
                            positions_.begin() + static_cast<std::ptrdiff_t>(starts_[i + 1]));
        t.starts_.push_back(t.positions_.size());
    }
    return t;
}

} // namespace ranger
