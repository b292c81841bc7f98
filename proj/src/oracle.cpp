#include "ranger/oracle.hpp"

#include <iomanip>

#include "ranger/errors.hpp"

namespace ranger {

ExactMap ExactMap::build(const SeedTable& table) {
    ExactMap m;
    m.map_.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const EntryView e = table.entry(i);
        if (!m.map_.emplace(e.key.value, std::vector<Position>(e.positions.begin(), e.positions.end())).second) {
            throw BuildError("duplicate key in oracle input");
        }
    }
    return m;
}

ExactMap ExactMap::build(std::span<const MinimizerEntry> entries) {
    ExactMap m;
    m.map_.reserve(entries.size());
    for (const MinimizerEntry& e : entries) {
        if (!m.map_.emplace(e.key.value, e.positions).second) {
            throw BuildError("duplicate key in oracle input");
        }
    }
    return m;
}

const std::vector<Position>* ExactMap::find(std::uint64_t key) const noexcept {
    const auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
}

std::uint64_t model_hash_capacity(std::uint64_t n) {
    if (n == 0) {
        throw ParameterError("hash model needs at least one entry");
    }
    std::uint64_t cap = 1;
    while (n * 100 > cap * 77) { // load factor 0.77, exact
        cap <<= 1;
    }
    return cap;
}

std::uint64_t model_hash_bytes(std::uint64_t n, ValueWidth w) {
    return model_hash_capacity(n) * (kHashModelKeyBytes + value_bytes(w));
}

HashModelReport compare_footprint(const RangerIndex& index, std::uint64_t n) {
    HashModelReport r;
    r.entries = n;
    r.modeled_capacity = model_hash_capacity(n);
    r.modeled_index_bytes = model_hash_bytes(n, index.header().value_width);
    r.ranger_index_bytes = index.model().blob_size() + 8 * index.bucket_count() + index.bucket_section().size();
    r.position_bytes = index.position_section().size();
    r.utilization = static_cast<double>(index.header().entry_count) /
                    static_cast<double>(kBucketSlots * index.bucket_count());
    r.ratio = static_cast<double>(r.modeled_index_bytes) / static_cast<double>(r.ranger_index_bytes);
    return r;
}

void print_footprint(std::ostream& os, const HashModelReport& r) {
    const auto flags = os.flags();
    os << std::fixed << std::setprecision(3);
    os << "hash-table model: power-of-two open addressing, max load " << kHashModelLoad << ", slot = "
       << kHashModelKeyBytes << " B key + value\n";
    os << "  entries " << r.entries << ", capacity " << r.modeled_capacity << "\n";
    os << "  index bytes: hash model " << r.modeled_index_bytes << ", ranger " << r.ranger_index_bytes << " ("
       << r.ratio << "x), positions " << r.position_bytes << " (excluded)\n";
    os << "[footprint]\nentries=" << r.entries << "\nmodel_load=" << kHashModelLoad
       << "\nmodel_capacity=" << r.modeled_capacity << "\nmodel_index_bytes=" << r.modeled_index_bytes
       << "\nranger_index_bytes=" << r.ranger_index_bytes << "\nposition_bytes=" << r.position_bytes
       << "\nutilization=" << r.utilization << "\nratio=" << r.ratio << "\n";
    os.flags(flags);
}

} // namespace ranger
