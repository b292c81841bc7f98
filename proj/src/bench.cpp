#include "ranger/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <random>

#include "ranger/stats.hpp"

namespace ranger {

namespace {

using Clock = std::chrono::steady_clock;

double ns_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
}

PhaseTiming summarize(std::vector<double> per_key) {
    PhaseTiming t;
    if (per_key.empty()) {
        return t;
    }
    double sum = 0.0;
    for (double v : per_key) {
        sum += v;
    }
    t.mean_ns = sum / static_cast<double>(per_key.size());
    std::sort(per_key.begin(), per_key.end());
    const std::size_t n = per_key.size();
    t.median_ns = n % 2 ? per_key[n / 2] : (per_key[n / 2 - 1] + per_key[n / 2]) / 2;
    return t;
}

double percentile(std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        return 0.0;
    }
    const auto i = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
    return sorted[i];
}

} // namespace

unsigned search_lines(const RangerIndex& index, std::uint64_t key, const RangeWindow& window) {
    const auto bounds = index.lower_bounds();
    if (key < bounds.front()) {
        return 0;
    }
    std::vector<std::uintptr_t> lines;
    std::size_t lo = window.lo;
    std::size_t hi = window.hi;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        const auto line = reinterpret_cast<std::uintptr_t>(&bounds[mid]) / kCacheLine;
        if (std::find(lines.begin(), lines.end(), line) == lines.end()) {
            lines.push_back(line);
        }
        if (bounds[mid] <= key) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    return static_cast<unsigned>(lines.size());
}

BenchReport run_bench(const RangerIndex& index, const BenchConfig& cfg, std::span<const std::uint64_t> indexed_pool) {
    BenchReport r;
    const unsigned k = index.header().k;
    const std::uint64_t mask = key_mask(k);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::uint64_t> keys(cfg.keys);
    for (std::uint64_t& key : keys) {
        const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
        if (!indexed_pool.empty() && u < cfg.indexed_fraction) {
            key = indexed_pool[rng() % indexed_pool.size()];
            ++r.indexed_keys;
        } else {
            key = rng() & mask;
        }
    }
    r.keys = keys.size();
    r.certified_error = index.model().max_error();
    r.steps_bound = probe_steps_bound(r.certified_error);
    const std::size_t n = keys.size();
    if (n == 0) {
        return r;
    }

    std::vector<RangeWindow> windows(n);
    std::vector<RangeSearch> searches(n);
    std::vector<int> slots(n);
    std::vector<Position> scratch;
    std::uint64_t sink = 0;

    std::vector<double> t_inf, t_search, t_probe, t_fetch, t_e2e;
    for (unsigned rep = 0; rep < cfg.warmup + cfg.repetitions; ++rep) {
        auto t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            windows[i] = index.locate(keys[i]);
        }
        const double inf = ns_since(t0);

        t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            searches[i] = index.search(keys[i], windows[i]);
        }
        const double srch = ns_since(t0);

        t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            slots[i] = searches[i].found ? index.probe(searches[i].bucket, keys[i]) : -1;
        }
        const double prb = ns_since(t0);

        t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            if (slots[i] >= 0) {
                scratch.clear();
                index.fetch(searches[i].bucket, slots[i], scratch);
                sink += scratch.size();
            }
        }
        const double fch = ns_since(t0);

        t0 = Clock::now();
        for (std::size_t i = 0; i < n; ++i) {
            const RangeSearch s = index.search(keys[i], index.locate(keys[i]));
            if (!s.found) {
                continue;
            }
            const int slot = index.probe(s.bucket, keys[i]);
            if (slot >= 0) {
                scratch.clear();
                index.fetch(s.bucket, slot, scratch);
                sink += scratch.size();
            }
        }
        const double e2e = ns_since(t0);

        if (rep >= cfg.warmup) {
            const auto dn = static_cast<double>(n);
            t_inf.push_back(inf / dn);
            t_search.push_back(srch / dn);
            t_probe.push_back(prb / dn);
            t_fetch.push_back(fch / dn);
            t_e2e.push_back(e2e / dn);
        }
    }
    r.inference = summarize(t_inf);
    r.range_search = summarize(t_search);
    r.bucket_probe = summarize(t_probe);
    r.position_fetch = summarize(t_fetch);
    r.end_to_end = summarize(t_e2e);
    const double phase_sum =
        r.inference.mean_ns + r.range_search.mean_ns + r.bucket_probe.mean_ns + r.position_fetch.mean_ns;
    r.phase_sum_ratio = r.end_to_end.mean_ns > 0 ? phase_sum / r.end_to_end.mean_ns : 0.0;
    r.throughput_mlps = r.end_to_end.mean_ns > 0 ? 1e3 / r.end_to_end.mean_ns : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        r.found += slots[i] >= 0;
        const unsigned steps = searches[i].steps;
        const unsigned lines = search_lines(index, keys[i], windows[i]);
        if (r.step_histogram.size() <= steps) {
            r.step_histogram.resize(steps + 1);
        }
        if (r.line_histogram.size() <= lines) {
            r.line_histogram.resize(lines + 1);
        }
        ++r.step_histogram[steps];
        ++r.line_histogram[lines];
        r.max_steps = std::max(r.max_steps, steps);
        r.max_lines = std::max(r.max_lines, lines);
    }
    r.not_found = n - r.found;

    // per-key latency distribution (clock overhead included)
    std::vector<double> lat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t0 = Clock::now();
        const RangeSearch s = index.search(keys[i], index.locate(keys[i]));
        if (s.found) {
            const int slot = index.probe(s.bucket, keys[i]);
            if (slot >= 0) {
                scratch.clear();
                index.fetch(s.bucket, slot, scratch);
                sink += scratch.size();
            }
        }
        lat[i] = ns_since(t0);
    }
    std::sort(lat.begin(), lat.end());
    r.p50_ns = percentile(lat, 0.50);
    r.p90_ns = percentile(lat, 0.90);
    r.p99_ns = percentile(lat, 0.99);

    std::vector<Key64> typed(n);
    for (std::size_t i = 0; i < n; ++i) {
        typed[i] = {keys[i], static_cast<std::uint8_t>(k)};
    }
    auto t0 = Clock::now();
    sink += batch_lookup_serial(index, typed).size();
    r.serial_batch_ns = ns_since(t0) / static_cast<double>(n);
    t0 = Clock::now();
    sink += batch_lookup(index, typed, cfg.threads).size();
    r.parallel_batch_ns = ns_since(t0) / static_cast<double>(n);

    volatile std::uint64_t keep = sink;
    (void)keep;
    return r;
}

void print_bench(std::ostream& os, const BenchReport& r) {
    const auto flags = os.flags();
    os << std::fixed << std::setprecision(1);
    os << "lookups " << r.keys << " (" << r.indexed_keys << " drawn from indexed keys), found " << r.found
       << ", not found " << r.not_found << "\n";
    auto row = [&](const char* name, const PhaseTiming& t) {
        os << "  " << std::left << std::setw(18) << name << std::right << std::setw(9) << t.mean_ns << " ns mean"
           << std::setw(9) << t.median_ns << " ns median\n";
    };
    row("model inference", r.inference);
    row("range search", r.range_search);
    row("bucket probe", r.bucket_probe);
    row("position fetch", r.position_fetch);
    row("end to end", r.end_to_end);
    os << std::setprecision(3) << "  phase sum / end-to-end = " << r.phase_sum_ratio
       << (r.phase_sum_ratio > 0.9 && r.phase_sum_ratio < 1.1 ? " (within 10%)" : " (outside 10%)") << "\n";
    os << std::setprecision(1) << "  per-key latency p50/p90/p99 " << r.p50_ns << " / " << r.p90_ns << " / "
       << r.p99_ns << " ns\n";
    os << std::setprecision(2) << "  throughput " << r.throughput_mlps << " M lookups/s\n";
    os << std::setprecision(1) << "  batch lookup serial " << r.serial_batch_ns << " ns/key, parallel "
       << r.parallel_batch_ns << " ns/key\n";
    os << "  search steps: max " << r.max_steps << ", bound " << r.steps_bound << " (certified error "
       << r.certified_error << "), max range lines " << r.max_lines << "\n  step histogram:";
    for (std::size_t i = 0; i < r.step_histogram.size(); ++i) {
        if (r.step_histogram[i]) {
            os << " " << i << ":" << r.step_histogram[i];
        }
    }
    os << "\n  soft check model inference < bucket probe: "
       << (r.inference.mean_ns < r.bucket_probe.mean_ns ? "yes" : "no") << "\n";
    os << std::setprecision(3) << "[bench]\nkeys=" << r.keys << "\nfound=" << r.found << "\nnot_found=" << r.not_found
       << "\ninference_ns=" << r.inference.mean_ns << "\nrange_search_ns=" << r.range_search.mean_ns
       << "\nbucket_probe_ns=" << r.bucket_probe.mean_ns << "\nposition_fetch_ns=" << r.position_fetch.mean_ns
       << "\nend_to_end_ns=" << r.end_to_end.mean_ns << "\nend_to_end_median_ns=" << r.end_to_end.median_ns
       << "\nphase_sum_ratio=" << r.phase_sum_ratio << "\np99_ns=" << r.p99_ns << "\nmax_steps=" << r.max_steps
       << "\nsteps_bound=" << r.steps_bound << "\nmax_range_lines=" << r.max_lines
       << "\nserial_batch_ns=" << r.serial_batch_ns << "\nparallel_batch_ns=" << r.parallel_batch_ns << "\n";
    os.flags(flags);
}

} // namespace ranger
