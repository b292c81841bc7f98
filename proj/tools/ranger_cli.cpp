// ranger: build, query, verify, stats and bench for the learned seed index.

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ranger/bench.hpp"
#include "ranger/errors.hpp"
#include "ranger/fasta.hpp"
#include "ranger/oracle.hpp"
#include "ranger/rangeindex.hpp"
#include "ranger/stats.hpp"

using namespace ranger;

namespace {

enum Exit : int {
    exit_ok = 0,
    exit_other = 1,
    exit_parameter = 2,
    exit_io = 3,
    exit_format = 4,
    exit_verification = 5,
    exit_build = 6,
};

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::encoding: return exit_parameter;
    case ErrorKind::io: return exit_io;
    case ErrorKind::parse:
    case ErrorKind::format: return exit_format;
    case ErrorKind::verification: return exit_verification;
    case ErrorKind::build: return exit_build;
    }
    return exit_other;
}

struct BuildArgs {
    std::string ref;
    std::string index;
    unsigned k = 15;
    unsigned w = 10;
    std::string preset;
    unsigned value_width = 64;
    std::vector<std::size_t> stages{1, 8, 119};
    std::uint32_t error_threshold = 1024;
    unsigned max_trials = 5;
    std::uint64_t seed = 1;
    std::optional<std::size_t> max_positions;
    unsigned epochs = 300;
    std::size_t samples = 8192;
};

ValueWidth parse_value_width(unsigned bits) {
    if (bits != 32 && bits != 64) {
        throw ParameterError("--value-width must be 32 or 64");
    }
    return static_cast<ValueWidth>(bits);
}

void apply_preset(BuildArgs& a) {
    if (a.preset == "short") {
        a.k = 28;
        a.w = 11;
    } else if (a.preset == "long") {
        a.k = 15;
        a.w = 10;
    } else if (!a.preset.empty()) {
        throw ParameterError("unknown preset '" + a.preset + "' (short or long)");
    }
}

// RANGER_THREADS caps the OpenMP pool used for batched lookups
int worker_threads() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("RANGER_THREADS")) {
        int cap = 0;
        const auto [p, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec != std::errc{} || *p != '\0' || cap < 1) {
            throw ParameterError("RANGER_THREADS must be a positive integer");
        }
        n = std::min(n, cap);
    }
    return n;
}

int cmd_build(BuildArgs a) {
    apply_preset(a);
    check_k(a.k);
    if (a.w < 1 || a.w > 255) {
        throw ParameterError("-w must be in 1..255");
    }
    BuildOptions opts;
    opts.w = a.w;
    opts.value_width = parse_value_width(a.value_width);
    opts.max_positions = a.max_positions;
    opts.model.stage_widths = a.stages;
    opts.model.error_threshold = a.error_threshold;
    opts.model.max_trials = a.max_trials;
    opts.model.seed = a.seed;
    opts.model.epochs = a.epochs;
    opts.model.samples_per_net = a.samples;
    if (a.max_trials < 1) {
        throw ParameterError("--max-trials must be >= 1");
    }

    const auto refs = load_fasta(a.ref);
    const SeedTable table = SeedTable::from_sequences(refs, a.k, a.w);
    if (table.empty()) {
        throw BuildError("no seeds extracted from '" + a.ref + "'");
    }
    rqrmi::TrainLog log;
    const RangerIndex idx = RangerIndex::build(table, opts, &log);
    idx.save(a.index);

    std::cout << "built " << a.index << " from " << refs.size() << " sequence(s); trials:";
    for (auto e : log.trial_max_errors) {
        std::cout << ' ' << e;
    }
    std::cout << " (kept " << log.best_trial + 1 << ")\n";
    print_stats(std::cout, compute_stats(idx));
    return exit_ok;
}

std::string key_hex(std::uint64_t v, unsigned k) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(static_cast<int>((2 * k + 3) / 4)) << v;
    return os.str();
}

std::uint64_t parse_hex_key(std::string_view s, unsigned k, std::size_t line) {
    if (s.starts_with("0x") || s.starts_with("0X")) {
        s.remove_prefix(2);
    }
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError("malformed hex key '" + std::string(s) + "'", line);
    }
    if (v > key_mask(k)) {
        throw ParseError("key exceeds 4^k for k=" + std::to_string(k), line);
    }
    return v;
}

struct QueryItem {
    std::size_t source; // index into the read-id table
    Key64 key;
};

int cmd_query(const std::string& index_path, const std::string& reads, const std::string& keys_path,
              std::size_t batch_size) {
    if (reads.empty() == keys_path.empty()) {
        throw ParameterError("query needs exactly one of --reads or --keys");
    }
    if (batch_size == 0) {
        throw ParameterError("--batch-size must be >= 1");
    }
    const RangerIndex idx = RangerIndex::load(index_path);
    const unsigned k = idx.header().k;
    const unsigned w = idx.header().w;
    const int threads = worker_threads();

    std::vector<std::string> ids;
    std::vector<QueryItem> items;
    if (!reads.empty()) {
        for (const RefSequence& r : load_fasta(reads)) {
            ids.push_back(r.name);
            for (const MinimizerHit& h : extract_minimizers(r, k, w)) {
                items.push_back({ids.size() - 1, h.key});
            }
        }
    } else {
        std::ifstream in(keys_path);
        if (!in) {
            throw IoError("cannot open key list '" + keys_path + "'");
        }
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') {
                continue;
            }
            const auto e = line.find_last_not_of(" \t\r");
            ids.push_back("line" + std::to_string(n));
            items.push_back({ids.size() - 1, {parse_hex_key(std::string_view(line).substr(b, e - b + 1), k, n),
                                              static_cast<std::uint8_t>(k)}});
        }
    }

    std::string out;
    std::vector<Key64> batch;
    for (std::size_t start = 0; start < items.size(); start += batch_size) {
        const std::size_t end = std::min(items.size(), start + batch_size);
        batch.clear();
        for (std::size_t i = start; i < end; ++i) {
            batch.push_back(items[i].key);
        }
        const auto results = batch_lookup(idx, batch, threads);
        out.clear();
        for (std::size_t i = start; i < end; ++i) {
            const auto& r = results[i - start];
            if (!r) {
                continue;
            }
            const std::string prefix = ids[items[i].source] + '\t' + key_hex(items[i].key.value, k) + '\t';
            for (const Position& p : *r) {
                out += prefix;
                out += std::to_string(p.seq) + '\t' + std::to_string(p.offset) + '\t' +
                       (p.strand == Strand::forward ? '+' : '-') + '\n';
            }
        }
        std::cout << out;
    }
    return exit_ok;
}

int cmd_verify(const std::string& index_path, const std::string& ref, std::optional<std::size_t> max_positions,
               std::size_t fp_samples, bool skip_crc) {
    const RangerIndex idx = RangerIndex::load(index_path, {!skip_crc});
    const IndexHeader& h = idx.header();
    SeedTable table = SeedTable::from_sequences(load_fasta(ref), h.k, h.w);
    if (max_positions) {
        table = table.without_frequent(*max_positions);
    }
    bool ok = true;
    auto report = [&](const char* name, const std::vector<std::string>& problems, const std::string& detail) {
        std::cout << (problems.empty() ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 10); ++i) {
            std::cout << "  " << problems[i] << "\n";
        }
        if (problems.size() > 10) {
            std::cout << "  ... " << problems.size() - 10 << " more\n";
        }
        ok = ok && problems.empty();
    };

    // (a) every reference key returns exactly the oracle's list
    {
        std::vector<std::string> problems;
        if (table.size() != h.entry_count) {
            problems.push_back("entry count: index " + std::to_string(h.entry_count) + ", reference " +
                               std::to_string(table.size()));
        }
        std::size_t bad = 0;
        for (std::size_t i = 0; i < table.size(); ++i) {
            const EntryView e = table.entry(i);
            const auto r = idx.lookup(e.key);
            if (!r || !std::equal(r->begin(), r->end(), e.positions.begin(), e.positions.end())) {
                ++bad;
                if (problems.size() < 50) {
                    problems.push_back("key " + key_hex(e.key.value, h.k) + ": expected " +
                                       std::to_string(e.positions.size()) + " position(s), got " +
                                       (r ? std::to_string(r->size()) : std::string("not found")));
                }
            }
        }
        report("equivalence", problems,
               std::to_string(table.size()) + " keys, " + std::to_string(bad) + " mismatches");
    }

    // (b) certificates: stored leaf errors cover a fresh analysis, and every lower bound is in its window
    {
        std::vector<std::string> problems;
        const auto lbs = idx.lower_bounds();
        const auto fresh = rqrmi::error_bound(idx.model(), lbs);
        const auto stored = idx.model().leaf_errors();
        for (std::size_t l = 0; l < fresh.size(); ++l) {
            if (fresh[l] > stored[l]) {
                problems.push_back("leaf " + std::to_string(l) + ": stored error " + std::to_string(stored[l]) +
                                   " < certified " + std::to_string(fresh[l]));
            }
        }
        for (std::size_t i = 0; i < lbs.size(); ++i) {
            const auto check = [&](std::uint64_t key, std::size_t truth) {
                const auto inf = idx.model().infer(key);
                if (std::llabs(inf.estimate - static_cast<std::int64_t>(truth)) > inf.error &&
                    problems.size() < 50) {
                    problems.push_back("key " + key_hex(key, h.k) + ": estimate " + std::to_string(inf.estimate) +
                                       " +- " + std::to_string(inf.error) + ", truth " + std::to_string(truth));
                }
            };
            check(lbs[i], i);
            if (i > 0 && lbs[i] - 1 != lbs[i - 1]) {
                check(lbs[i] - 1, i - 1);
            }
        }
        report("certificates", problems,
               std::to_string(lbs.size()) + " ranges, max error " + std::to_string(idx.model().max_error()));
    }

    // (c)
    report("structure", idx.structural_violations(), std::to_string(idx.bucket_count()) + " buckets");

    // (d) spurious matches on random absent keys
    {
        std::vector<std::string> problems;
        const ExactMap truth = ExactMap::build(table);
        std::mt19937_64 rng(0x5eed);
        std::size_t absent = 0;
        std::size_t fp = 0;
        const bool saturated = table.size() > key_mask(h.k) / 2;
        for (std::size_t tries = 0; absent < fp_samples && !saturated && tries < 20 * fp_samples; ++tries) {
            const std::uint64_t key = rng() & key_mask(h.k);
            if (truth.contains(key)) {
                continue;
            }
            ++absent;
            fp += idx.lookup({key, static_cast<std::uint8_t>(h.k)}).has_value();
        }
        const double rate = absent ? static_cast<double>(fp) / static_cast<double>(absent) : 0.0;
        if (rate >= 0.0015) {
            problems.push_back("false-positive rate " + std::to_string(rate) + " >= 0.0015");
        }
        std::ostringstream d;
        d << fp << " / " << absent << " absent keys matched (rate " << rate << ")";
        report("false-positives", problems, d.str());
    }

    std::cout << (ok ? "verify: PASS\n" : "verify: FAIL\n");
    return ok ? exit_ok : exit_verification;
}

int cmd_stats(const std::string& index_path) {
    const RangerIndex idx = RangerIndex::load(index_path);
    print_stats(std::cout, compute_stats(idx));
    print_footprint(std::cout, compare_footprint(idx, idx.header().entry_count));
    return exit_ok;
}

int cmd_bench(const std::string& index_path, std::size_t keys, std::uint64_t seed, const std::string& ref) {
    const RangerIndex idx = RangerIndex::load(index_path);
    BenchConfig cfg;
    cfg.keys = keys;
    cfg.seed = seed;
    cfg.threads = worker_threads();
    std::vector<std::uint64_t> pool;
    if (!ref.empty()) {
        const SeedTable t = SeedTable::from_sequences(load_fasta(ref), idx.header().k, idx.header().w);
        pool.assign(t.keys().begin(), t.keys().end());
    } else {
        pool.assign(idx.lower_bounds().begin(), idx.lower_bounds().end());
    }
    const BenchReport r = run_bench(idx, cfg, pool);
    print_bench(std::cout, r);
    const IndexStats s = compute_stats(idx);
    std::cout << "worst case per lookup: " << s.worst_case_accesses << " structural accesses (range array, bucket, "
              << "position list), " << s.worst_case_bytes << " bytes\n";
    return exit_ok;
}

std::vector<std::size_t> parse_stages(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || p != part.data() + part.size() || v == 0) {
            throw ParameterError("--stages expects positive integers like 1,8,119");
        }
        out.push_back(v);
    }
    if (out.empty() || out.size() > 3 || out[0] != 1) {
        throw ParameterError("--stages must list 1 to 3 widths starting with 1");
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ranger: learned range index over minimizer seeds"};
    app.require_subcommand(1);

    BuildArgs b;
    std::string stages = "1,8,119";
    std::size_t max_positions = 0;
    auto* build = app.add_subcommand("build", "Index the minimizers of a FASTA reference");
    build->add_option("--ref", b.ref, "Reference FASTA")->required();
    build->add_option("--index", b.index, "Output index file")->required();
    build->add_option("-k", b.k, "k-mer length (1..32)");
    build->add_option("-w", b.w, "Minimizer window");
    build->add_option("--preset", b.preset, "short = (28,11), long = (15,10); overrides -k/-w");
    build->add_option("--value-width", b.value_width, "32 or 64");
    build->add_option("--stages", stages, "Model stage widths, e.g. 1,8,119");
    build->add_option("--error-threshold", b.error_threshold, "Retrain while the certified error exceeds this");
    build->add_option("--max-trials", b.max_trials, "Training attempts");
    build->add_option("--seed", b.seed, "Training seed");
    auto* cap = build->add_option("--max-positions", max_positions, "Drop keys with more positions");
    build->add_option("--epochs", b.epochs, "SGD epochs per net");
    build->add_option("--samples", b.samples, "Training samples per net");

    std::string q_index, q_reads, q_keys;
    std::size_t batch_size = 65536;
    auto* query = app.add_subcommand("query", "Look up read minimizers or raw keys");
    query->add_option("--index", q_index)->required();
    query->add_option("--reads", q_reads, "Reads FASTA");
    query->add_option("--keys", q_keys, "File of hex keys, one per line");
    query->add_option("--batch-size", batch_size, "Keys per lookup batch");

    std::string v_index, v_ref;
    std::size_t v_cap = 0;
    std::size_t fp_samples = 1'000'000;
    bool skip_crc = false;
    auto* verify = app.add_subcommand("verify", "Check an index against its reference");
    verify->add_option("--index", v_index)->required();
    verify->add_option("--ref", v_ref)->required();
    auto* v_cap_opt = verify->add_option("--max-positions", v_cap, "Cap used at build time");
    verify->add_option("--fp-samples", fp_samples, "Random absent keys for the false-positive check");
    verify->add_flag("--skip-crc", skip_crc, "Load without checksum validation")->group("");

    std::string s_index;
    auto* stats = app.add_subcommand("stats", "Print index statistics");
    stats->add_option("--index", s_index)->required();

    std::string bn_index, bn_ref;
    std::size_t bn_keys = 1'000'000;
    std::uint64_t bn_seed = 1;
    auto* bench = app.add_subcommand("bench", "Time the lookup phases");
    bench->add_option("--index", bn_index)->required();
    bench->add_option("--keys", bn_keys, "Lookups per repetition");
    bench->add_option("--seed", bn_seed);
    bench->add_option("--ref", bn_ref, "Draw indexed keys from this reference instead of the range bounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_parameter;
    }

    try {
        if (*build) {
            b.stages = parse_stages(stages);
            if (*cap) {
                b.max_positions = max_positions;
            }
            return cmd_build(b);
        }
        if (*query) {
            return cmd_query(q_index, q_reads, q_keys, batch_size);
        }
        if (*verify) {
            return cmd_verify(v_index, v_ref, *v_cap_opt ? std::optional<std::size_t>(v_cap) : std::nullopt,
                              fp_samples, skip_crc);
        }
        if (*stats) {
            return cmd_stats(s_index);
        }
        if (*bench) {
            return cmd_bench(bn_index, bn_keys, bn_seed, bn_ref);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_other;
    }
    return exit_other;
}
