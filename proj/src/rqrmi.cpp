#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ranger/bytes.hpp"
#include "ranger/errors.hpp"
#include "ranger/keycodec.hpp"
#include "ranger/rqrmi.hpp"
#include "ranger/tinynet_fit.hpp"

namespace ranger::rqrmi {

Model::Model(std::vector<std::vector<TinyNet>> stages, std::uint64_t range_count, double input_scale,
             std::vector<std::uint32_t> leaf_errors)
    : stages_(std::move(stages)), range_count_(range_count), input_scale_(input_scale),
      leaf_errors_(std::move(leaf_errors)) {
    if (stages_.empty() || stages_.size() > kMaxStages) {
        throw ParameterError("model must have 1 to 3 stages");
    }
    if (stages_[0].size() != 1) {
        throw ParameterError("first model stage must contain exactly one net");
    }
    for (const auto& s : stages_) {
        if (s.empty()) {
            throw ParameterError("empty model stage");
        }
        for (const TinyNet& n : s) {
            if (!n.finite()) {
                throw ParameterError("non-finite net parameter");
            }
        }
    }
    if (range_count_ == 0) {
        throw ParameterError("model range count must be >= 1");
    }
    if (!(input_scale_ > 0.0) || !std::isfinite(input_scale_)) {
        throw ParameterError("model input scale must be positive and finite");
    }
    if (leaf_errors_.size() != stages_.back().size()) {
        throw ParameterError("leaf error count does not match last stage width");
    }
}

std::vector<std::size_t> Model::widths() const {
    std::vector<std::size_t> w;
    for (const auto& s : stages_) {
        w.push_back(s.size());
    }
    return w;
}

std::uint32_t Model::max_error() const noexcept {
    return leaf_errors_.empty() ? 0 : *std::max_element(leaf_errors_.begin(), leaf_errors_.end());
}

void Model::set_leaf_errors(std::vector<std::uint32_t> errors) {
    if (errors.size() != stages_.back().size()) {
        throw ParameterError("leaf error count does not match last stage width");
    }
    leaf_errors_ = std::move(errors);
}

std::size_t Model::route_to(std::size_t stage, double x) const noexcept {
    std::size_t net = 0;
    for (std::size_t s = 0; s < stage; ++s) {
        net = select_next(nn_eval(stages_[s][net], x), range_count_, stages_[s + 1].size());
    }
    return net;
}

namespace {

std::int64_t clamp_floor(double v, std::uint64_t range_count) noexcept {
    if (!(v >= 0.0)) {
        return 0;
    }
    const double last = static_cast<double>(range_count - 1);
    if (v >= last) {
        return static_cast<std::int64_t>(range_count - 1);
    }
    return static_cast<std::int64_t>(std::floor(v));
}

} // namespace

Inference Model::infer_normalized(double x) const noexcept {
    std::size_t net = 0;
    double y = 0.0;
    for (std::size_t s = 0; s < stages_.size(); ++s) {
        y = nn_eval(stages_[s][net], x);
        if (s + 1 < stages_.size()) {
            net = select_next(y, range_count_, stages_[s + 1].size());
        }
    }
    return {clamp_floor(y, range_count_), leaf_errors_[net], static_cast<std::uint32_t>(net)};
}

Responsibility Model::responsibility(std::size_t stage, bool conservative) const {
    Responsibility r;
    r.per_net = {IntervalSet{{0.0, 1.0}}};
    for (std::size_t s = 0; s < stage; ++s) {
        r = route(stages_[s], r, range_count_, stages_[s + 1].size(), conservative);
    }
    return r;
}

// blob: u8 stages, u8[3] reserved, u32 widths[], u64 R, f32 params (w1,b1,w2,b2) per net,
// u32 leaf errors[], f64 input scale
std::size_t Model::blob_size() const noexcept {
    std::size_t nets = 0;
    for (const auto& s : stages_) {
        nets += s.size();
    }
    return 4 + 4 * stages_.size() + 8 + nets * kParamsPerNet * 4 + 4 * leaf_errors_.size() + 8;
}

void Model::append_blob(std::vector<std::byte>& out) const {
    ByteWriter w(out);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(stages_.size()));
    w.put<std::uint8_t>(0);
    w.put<std::uint16_t>(0);
    for (const auto& s : stages_) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    }
    w.put<std::uint64_t>(range_count_);
    for (const auto& s : stages_) {
        for (const TinyNet& n : s) {
            for (double v : n.w1) w.put<float>(static_cast<float>(v));
            for (double v : n.b1) w.put<float>(static_cast<float>(v));
            for (double v : n.w2) w.put<float>(static_cast<float>(v));
            w.put<float>(static_cast<float>(n.b2));
        }
    }
    for (std::uint32_t e : leaf_errors_) {
        w.put<std::uint32_t>(e);
    }
    w.put<double>(input_scale_);
}

Model Model::from_blob(std::span<const std::byte> blob) {
    ByteReader r(blob, "model section");
    const auto stage_count = r.get<std::uint8_t>();
    r.get<std::uint8_t>();
    r.get<std::uint16_t>();
    if (stage_count == 0 || stage_count > kMaxStages) {
        throw FormatError(FormatFault::bad_model, "model stage count " + std::to_string(stage_count) + " out of range");
    }
    std::vector<std::size_t> widths(stage_count);
    for (auto& w : widths) {
        w = r.get<std::uint32_t>();
        if (w == 0 || w > (1u << 20)) {
            throw FormatError(FormatFault::bad_model, "model stage width out of range");
        }
    }
    const auto range_count = r.get<std::uint64_t>();
    std::vector<std::vector<TinyNet>> stages(stage_count);
    for (std::size_t s = 0; s < stage_count; ++s) {
        stages[s].resize(widths[s]);
        for (TinyNet& n : stages[s]) {
            for (double& v : n.w1) v = r.get<float>();
            for (double& v : n.b1) v = r.get<float>();
            for (double& v : n.w2) v = r.get<float>();
            n.b2 = r.get<float>();
        }
    }
    std::vector<std::uint32_t> errors(widths.back());
    for (auto& e : errors) {
        e = r.get<std::uint32_t>();
    }
    const double scale = r.get<double>();
    if (r.remaining() != 0) {
        throw FormatError(FormatFault::bad_model, "trailing bytes in model section");
    }
    try {
        return Model(std::move(stages), range_count, scale, std::move(errors));
    } catch (const ParameterError& e) {
        throw FormatError(FormatFault::bad_model, std::string("invalid model: ") + e.what());
    }
}

std::uint64_t step_index(std::span<const double> xs, double x) noexcept {
    const auto n = static_cast<std::uint64_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    return n == 0 ? 0 : n - 1;
}

std::vector<std::size_t> effective_widths(std::span<const std::size_t> widths, std::uint64_t range_count) {
    if (widths.empty() || widths.size() > kMaxStages || widths[0] != 1) {
        throw ParameterError("stage widths must list 1 to 3 stages and start with 1");
    }
    if (std::any_of(widths.begin(), widths.end(), [](std::size_t w) { return w == 0; })) {
        throw ParameterError("stage widths must be >= 1");
    }
    std::vector<std::size_t> out(widths.begin(), widths.end());
    double product = 1.0;
    for (std::size_t w : out) {
        product *= static_cast<double>(w);
    }
    const auto r = static_cast<double>(range_count);
    if (out.size() > 1 && r < product) {
        const double factor = std::pow(r / product, 1.0 / static_cast<double>(out.size() - 1));
        for (std::size_t s = 1; s < out.size(); ++s) {
            out[s] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(out[s]) * factor)));
        }
        // floor can still leave product > R when early stages clamp to 1
        auto prod = [&] {
            std::uint64_t p = 1;
            for (std::size_t w : out) p *= w;
            return p;
        };
        while (prod() > range_count) {
            auto widest = std::max_element(out.begin() + 1, out.end());
            if (*widest == 1) break;
            --*widest;
        }
    }
    return out;
}

std::vector<std::size_t> scaled_widths(std::uint64_t range_count) {
    const std::uint64_t leaves = std::max<std::uint64_t>(1, (range_count + 109999) / 110000);
    const std::uint64_t middle = std::max<std::uint64_t>(1, (leaves * 8 + 118) / 119);
    return {1, static_cast<std::size_t>(middle), static_cast<std::size_t>(leaves)};
}

namespace {

struct Samples {
    std::vector<double> xs;
    std::vector<double> ys;
};

/// Half the budget uniform over the set's measure, half drawn from the lower
/// bounds inside it; plus the set's endpoints.
Samples draw_samples(const IntervalSet& set, std::span<const double> bounds, std::size_t budget, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform01 = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    Samples s;
    auto add = [&](double x) {
        s.xs.push_back(x);
        s.ys.push_back(static_cast<double>(step_index(bounds, x)));
    };

    for (const Interval& i : set) {
        add(i.lo);
        add(i.hi);
    }

    // index ranges of bounds inside the set
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t inside = 0;
    for (const Interval& i : set) {
        const auto b = static_cast<std::size_t>(std::lower_bound(bounds.begin(), bounds.end(), i.lo) - bounds.begin());
        const auto e = static_cast<std::size_t>(std::upper_bound(bounds.begin(), bounds.end(), i.hi) - bounds.begin());
        if (b < e) {
            runs.emplace_back(b, e);
            inside += e - b;
        }
    }
    const std::size_t from_data = inside == 0 ? 0 : std::min(inside, budget / 2);
    const std::size_t uniform = budget - from_data;

    const double total = measure(set);
    if (total > 0.0) {
        std::vector<double> cumulative;
        double acc = 0.0;
        for (const Interval& i : set) {
            acc += i.hi - i.lo;
            cumulative.push_back(acc);
        }
        for (std::size_t n = 0; n < uniform; ++n) {
            const double r = uniform01() * total;
            const auto idx = std::min<std::size_t>(
                static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin()),
                set.size() - 1);
            const double before = idx == 0 ? 0.0 : cumulative[idx - 1];
            add(std::min(set[idx].hi, set[idx].lo + (r - before)));
        }
    }

    if (from_data == inside) {
        for (const auto& [b, e] : runs) {
            for (std::size_t i = b; i < e; ++i) {
                add(bounds[i]);
            }
        }
    } else {
        for (std::size_t n = 0; n < from_data; ++n) {
            std::size_t pick = rng() % inside;
            for (const auto& [b, e] : runs) {
                if (pick < e - b) {
                    add(bounds[b + pick]);
                    break;
                }
                pick -= e - b;
            }
        }
    }
    return s;
}

Model train_once(std::span<const std::uint64_t> lower_bounds, std::span<const double> xs, double scale,
                 std::span<const std::size_t> widths, const TrainConfig& cfg, std::uint64_t seed) {
    const std::uint64_t r = lower_bounds.size();
    const FitConfig fit{cfg.epochs, 256, 0.05};
    std::vector<std::vector<TinyNet>> stages(widths.size());
    Responsibility resp;
    resp.per_net = {IntervalSet{{0.0, 1.0}}};

    for (std::size_t s = 0; s < widths.size(); ++s) {
        stages[s].assign(widths[s], TinyNet{});
        const auto count = static_cast<std::ptrdiff_t>(widths[s]);
#pragma omp parallel for schedule(dynamic, 1) if (cfg.parallel)
        for (std::ptrdiff_t n = 0; n < count; ++n) {
            const IntervalSet& set = resp.per_net[static_cast<std::size_t>(n)];
            if (set.empty()) {
                continue; // unreachable net
            }
            const std::uint64_t net_seed = mix_seed(mix_seed(seed, s), static_cast<std::uint64_t>(n));
            const Samples smp = draw_samples(set, xs, cfg.samples_per_net, net_seed);
            stages[s][static_cast<std::size_t>(n)] = fit_net(smp.xs, smp.ys, fit, mix_seed(net_seed, 1));
        }
        if (s + 1 < widths.size()) {
            resp = route(stages[s], resp, r, widths[s + 1], false);
        }
    }
    Model model(std::move(stages), r, scale, std::vector<std::uint32_t>(widths.back(), 0));
    model.set_leaf_errors(error_bound(model, lower_bounds, cfg.parallel));
    return model;
}

} // namespace

Model train(std::span<const std::uint64_t> lower_bounds, unsigned k, const TrainConfig& config, TrainLog* log) {
    check_k(k);
    if (lower_bounds.empty()) {
        throw ParameterError("cannot train a model on an empty range array");
    }
    for (std::size_t i = 1; i < lower_bounds.size(); ++i) {
        if (lower_bounds[i] <= lower_bounds[i - 1]) {
            throw ParameterError("lower bounds must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
    if (lower_bounds.back() > key_mask(k)) {
        throw ParameterError("lower bound exceeds the k-mer key domain");
    }
    if (config.max_trials == 0) {
        throw ParameterError("max_trials must be >= 1");
    }
    const double scale = std::ldexp(1.0, -2 * static_cast<int>(k));
    const auto widths = effective_widths(config.stage_widths, lower_bounds.size());

    std::vector<double> xs(lower_bounds.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = static_cast<double>(lower_bounds[i]) * scale;
    }

    if (log) {
        *log = TrainLog{};
        log->widths_used = widths;
    }
    Model best;
    for (unsigned trial = 0; trial < config.max_trials; ++trial) {
        Model m = train_once(lower_bounds, xs, scale, widths, config, mix_seed(config.seed, trial));
        if (log) {
            log->trial_max_errors.push_back(m.max_error());
        }
        if (trial == 0 || m.max_error() < best.max_error()) {
            best = std::move(m);
            if (log) {
                log->best_trial = trial;
            }
        }
        if (best.max_error() <= config.error_threshold) {
            break;
        }
    }
    return best;
}

namespace {

std::uint32_t leaf_error(const TinyNet& net, const IntervalSet& set, std::span<const double> xs, std::uint64_t r) {
    const double noise = output_noise(net);
    std::uint64_t worst = 0;
    std::vector<double> cuts;
    auto index_range = [&](double v) {
        return std::pair{clamp_floor(v - noise, r), clamp_floor(v + noise, r)};
    };
    for (const Interval& dom : set) {
        cuts.clear();
        cuts.push_back(dom.lo);
        cuts.push_back(dom.hi);
        const PwlFunction f = pwl_decompose(net, dom);
        cuts.insert(cuts.end(), f.breakpoints.begin(), f.breakpoints.end());
        const auto b = std::lower_bound(xs.begin(), xs.end(), dom.lo);
        const auto e = std::upper_bound(b, xs.end(), dom.hi);
        cuts.insert(cuts.end(), b, e);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        std::pair<std::int64_t, std::int64_t> prev_est{};
        std::int64_t prev_truth = 0;
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            const double x = cuts[c];
            const auto est = index_range(nn_eval(net, x));
            const auto before = static_cast<std::uint64_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
            const auto upto = static_cast<std::uint64_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
            const auto t_lo = static_cast<std::int64_t>(before == 0 ? 0 : before - 1);
            const auto t_hi = static_cast<std::int64_t>(upto == 0 ? 0 : upto - 1);
            worst = std::max<std::uint64_t>(worst, static_cast<std::uint64_t>(std::max(est.second - t_lo, t_hi - est.first)));
            if (c > 0) {
                // open interval (cuts[c-1], x): truth constant, estimate between the endpoint values
                const std::int64_t lo = std::min(prev_est.first, est.first);
                const std::int64_t hi = std::max(prev_est.second, est.second);
                worst = std::max<std::uint64_t>(worst, static_cast<std::uint64_t>(std::max(hi - prev_truth, prev_truth - lo)));
            }
            prev_est = est;
            prev_truth = t_hi;
        }
    }
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(worst, UINT32_MAX));
}

} // namespace

std::vector<std::uint32_t> error_bound(const Model& model, std::span<const std::uint64_t> lower_bounds, bool parallel) {
    const std::uint64_t r = model.range_count();
    if (lower_bounds.size() != r) {
        throw ParameterError("lower bound count does not match model range count");
    }
    std::vector<double> xs(lower_bounds.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = model.normalize(lower_bounds[i]);
    }
    const std::size_t last = model.stage_count() - 1;
    const Responsibility resp = model.responsibility(last, true);
    const auto& leaves = model.stage(last);
    std::vector<std::uint32_t> errors(leaves.size(), 0);
    const auto count = static_cast<std::ptrdiff_t>(leaves.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::ptrdiff_t m = 0; m < count; ++m) {
        const auto i = static_cast<std::size_t>(m);
        errors[i] = leaf_error(leaves[i], resp.per_net[i], xs, r);
    }
    return errors;
}

} // namespace ranger::rqrmi
