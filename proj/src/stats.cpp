#include "ranger/stats.hpp"

#include <bit>
#include <iomanip>
#include <numeric>

namespace ranger {

namespace {

unsigned ceil_log2(std::uint64_t v) noexcept { return v <= 1 ? 0 : static_cast<unsigned>(std::bit_width(v - 1)); }

} // namespace

unsigned probe_steps_bound(std::uint32_t error) noexcept { return ceil_log2(2 * std::uint64_t{error} + 2); }

unsigned range_line_bound(std::uint32_t error) noexcept {
    const std::uint64_t entries = 2 * std::uint64_t{error} + 1;
    const std::uint64_t per_line = kCacheLine / 8;
    const std::uint64_t lines = (entries + per_line - 1 + per_line - 1) / per_line; // worst alignment
    return ceil_log2(lines) + 1;
}

std::uint64_t worst_case_bytes(ValueWidth w, std::uint64_t max_list_length) noexcept {
    return kCacheLine + bucket_bytes(w) + max_list_length * value_bytes(w);
}

IndexStats compute_stats(const RangerIndex& index) {
    const IndexHeader& h = index.header();
    IndexStats s;
    s.k = h.k;
    s.w = h.w;
    s.value_bits = static_cast<unsigned>(h.value_width);
    s.keys = h.entry_count;
    s.buckets = index.bucket_count();
    for (std::size_t b = 0; b < index.bucket_count(); ++b) {
        const std::uint16_t* hashes = index.bucket_hashes(b);
        for (std::size_t slot = 0; slot < kBucketSlots && hashes[slot] != 0; ++slot) {
            if (hashes[slot] & kNonSingletonFlag) {
                const std::uint64_t n = index.position_record(index.bucket_value(b, slot));
                s.occurrences += n;
                s.max_list_length = std::max(s.max_list_length, n);
            } else {
                ++s.occurrences;
                ++s.singletons;
            }
        }
    }
    s.singleton_fraction = s.keys ? static_cast<double>(s.singletons) / static_cast<double>(s.keys) : 0.0;
    s.utilization = s.buckets ? static_cast<double>(s.keys) / static_cast<double>(kBucketSlots * s.buckets) : 0.0;
    s.model_bytes = index.model().blob_size();
    s.range_bytes = 8 * s.buckets;
    s.bucket_bytes = index.bucket_section().size();
    s.position_bytes = index.position_section().size();
    s.index_bytes = s.model_bytes + s.range_bytes + s.bucket_bytes;
    s.stage_widths = index.model().widths();
    const auto errors = index.model().leaf_errors();
    s.max_leaf_error = index.model().max_error();
    s.mean_leaf_error = errors.empty() ? 0.0
                                       : std::accumulate(errors.begin(), errors.end(), 0.0) /
                                             static_cast<double>(errors.size());
    s.probe_steps_bound = probe_steps_bound(s.max_leaf_error);
    s.range_line_bound = range_line_bound(s.max_leaf_error);
    s.worst_case_accesses = 3;
    s.worst_case_bytes = worst_case_bytes(h.value_width, s.max_list_length);
    return s;
}

void print_stats(std::ostream& os, const IndexStats& s) {
    const auto flags = os.flags();
    os << std::fixed << std::setprecision(4);
    os << "index: k=" << s.k << " w=" << s.w << " values=" << s.value_bits << "-bit\n";
    os << "  keys (unique)        " << s.keys << "\n";
    os << "  occurrences          " << s.occurrences << "\n";
    os << "  singletons           " << s.singletons << " (" << 100.0 * s.singleton_fraction << "%)\n";
    os << "  buckets              " << s.buckets << "\n";
    os << "  slot utilization     " << 100.0 * s.utilization << "%\n";
    os << "  bytes model/ranges/buckets/positions  " << s.model_bytes << " / " << s.range_bytes << " / "
       << s.bucket_bytes << " / " << s.position_bytes << "\n";
    os << "  model stages         ";
    for (std::size_t i = 0; i < s.stage_widths.size(); ++i) {
        os << (i ? "," : "") << s.stage_widths[i];
    }
    os << "\n";
    os << "  leaf error max/mean  " << s.max_leaf_error << " / " << s.mean_leaf_error << "\n";
    os << "  search steps bound   " << s.probe_steps_bound << " (range-array lines " << s.range_line_bound << ")\n";
    os << "  worst-case lookup    " << s.worst_case_accesses << " accesses, " << s.worst_case_bytes << " bytes\n";
    os << "[stats]\n";
    os << "k=" << s.k << "\nw=" << s.w << "\nvalue_bits=" << s.value_bits << "\nkeys=" << s.keys
       << "\noccurrences=" << s.occurrences << "\nsingletons=" << s.singletons
       << "\nsingleton_fraction=" << s.singleton_fraction << "\nbuckets=" << s.buckets
       << "\nutilization=" << s.utilization << "\nmodel_bytes=" << s.model_bytes << "\nrange_bytes=" << s.range_bytes
       << "\nbucket_bytes=" << s.bucket_bytes << "\nposition_bytes=" << s.position_bytes
       << "\nindex_bytes=" << s.index_bytes << "\nmax_leaf_error=" << s.max_leaf_error
       << "\nmean_leaf_error=" << s.mean_leaf_error << "\nprobe_steps_bound=" << s.probe_steps_bound
       << "\nrange_line_bound=" << s.range_line_bound << "\nworst_case_accesses=" << s.worst_case_accesses
       << "\nmax_list_length=" << s.max_list_length << "\nworst_case_bytes=" << s.worst_case_bytes << "\n";
    os.flags(flags);
}

} // namespace ranger
