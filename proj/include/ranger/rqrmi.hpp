#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ranger::rqrmi {

inline constexpr std::size_t kHidden = 8;
inline constexpr std::size_t kMaxStages = 3;
inline constexpr std::size_t kParamsPerNet = 3 * kHidden + 1;

/// y = w2 . ReLU(w1 * x + b1) + b2 for scalar x.
struct TinyNet {
    std::array<double, kHidden> w1{};
    std::array<double, kHidden> b1{};
    std::array<double, kHidden> w2{};
    double b2 = 0.0;

    bool finite() const noexcept;
    friend bool operator==(const TinyNet&, const TinyNet&) = default;
};

double nn_eval(const TinyNet& net, double x) noexcept;

/// Bound on the absolute rounding difference between nn_eval and the exact
/// real-valued net (and its piecewise-linear form) for x in [0, 1].
double output_noise(const TinyNet& net) noexcept;

/// floor(estimate / range_count * width), clamped into [0, width - 1].
std::size_t select_next(double estimate, std::uint64_t range_count, std::size_t width) noexcept;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};
using IntervalSet = std::vector<Interval>;

/// Sorts and merges overlapping or touching intervals in place.
void canonicalize(IntervalSet& set);
double measure(const IntervalSet& set) noexcept;
bool contains(const IntervalSet& set, double x) noexcept;

struct LinearPiece {
    double lo = 0.0;
    double hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;

    double at(double x) const noexcept { return slope * x + intercept; }
};

struct PwlFunction {
    Interval domain;
    std::vector<double> breakpoints; // strictly inside the domain, sorted
    std::vector<LinearPiece> pieces; // breakpoints.size() + 1 pieces

    double eval(double x) const noexcept;
};

/// Exact piecewise-linear form of `net` on `domain`. Breakpoints are the ReLU
/// hinges -b1/w1 lying strictly inside the domain, so at most 9 pieces.
PwlFunction pwl_decompose(const TinyNet& net, Interval domain);

/// Input intervals owned by each net of one stage.
struct Responsibility {
    std::vector<IntervalSet> per_net;
};

/// Splits every net's input set according to the next-stage net its output
/// selects. With `conservative`, each selection threshold is widened by the
/// net's output noise so that any x inference can send to net m is inside
/// m's set (sets of neighbours then overlap slightly).
Responsibility route(std::span<const TinyNet> nets, const Responsibility& inputs, std::uint64_t range_count,
                     std::size_t next_width, bool conservative);

struct Inference {
    std::int64_t estimate = 0;
    std::uint32_t error = 0;
    std::uint32_t leaf = 0;
};

/// Hierarchy of up to three stages of TinyNets with per-leaf certified errors.
class Model {
public:
    Model() = default;
    Model(std::vector<std::vector<TinyNet>> stages, std::uint64_t range_count, double input_scale,
          std::vector<std::uint32_t> leaf_errors);

    std::size_t stage_count() const noexcept { return stages_.size(); }
    std::size_t width(std::size_t stage) const noexcept { return stages_[stage].size(); }
    std::vector<std::size_t> widths() const;
    const std::vector<TinyNet>& stage(std::size_t s) const noexcept { return stages_[s]; }
    std::uint64_t range_count() const noexcept { return range_count_; }
    double input_scale() const noexcept { return input_scale_; }
    std::span<const std::uint32_t> leaf_errors() const noexcept { return leaf_errors_; }
    std::uint32_t max_error() const noexcept;
    void set_leaf_errors(std::vector<std::uint32_t> errors);

    double normalize(std::uint64_t key) const noexcept { return static_cast<double>(key) * input_scale_; }

    /// One net evaluation per stage.
    Inference infer(std::uint64_t key) const noexcept { return infer_normalized(normalize(key)); }
    Inference infer_normalized(double x) const noexcept;

    /// Net selected at `stage` for normalized input x.
    std::size_t route_to(std::size_t stage, double x) const noexcept;

    /// Input sets of the nets of `stage`, derived analytically from the earlier stages.
    Responsibility responsibility(std::size_t stage, bool conservative) const;

    std::size_t blob_size() const noexcept;
    void append_blob(std::vector<std::byte>& out) const;
    static Model from_blob(std::span<const std::byte> blob);

    friend bool operator==(const Model&, const Model&) = default;

private:
    std::vector<std::vector<TinyNet>> stages_;
    std::uint64_t range_count_ = 0;
    double input_scale_ = 1.0;
    std::vector<std::uint32_t> leaf_errors_;
};

struct TrainConfig {
    std::vector<std::size_t> stage_widths{1, 8, 119};
    std::uint32_t error_threshold = 1024;
    unsigned max_trials = 5;
    std::uint64_t seed = 1;
    std::size_t samples_per_net = 8192;
    unsigned epochs = 300;
    bool parallel = true;
};

struct TrainLog {
    std::vector<std::uint32_t> trial_max_errors;
    unsigned best_trial = 0;
    std::vector<std::size_t> widths_used;
};

/// Stage widths after shrinking for small range counts.
std::vector<std::size_t> effective_widths(std::span<const std::size_t> widths, std::uint64_t range_count);

/// {1, ceil(L*8/119), L} with L = ceil(range_count / 110000).
std::vector<std::size_t> scaled_widths(std::uint64_t range_count);

/// Trains on strictly increasing lower bounds of k-mer keys and certifies the
/// result. Retrains with fresh seeds while the worst leaf error exceeds the
/// threshold; returns the best model seen. Certificates hold either way.
Model train(std::span<const std::uint64_t> lower_bounds, unsigned k, const TrainConfig& config,
            TrainLog* log = nullptr);

/// Exact per-leaf bound on |clamp(floor(estimate)) - predecessor index|.
///
/// Each leaf's (conservatively routed) input set is cut at every hinge and
/// every lower bound. Between consecutive cut points the true index is
/// constant and the estimate linear, so checking the cut points bounds the
/// whole set. Keys that normalize to the same double as a lower bound may sit
/// on either side of it; both indices are checked there.
std::vector<std::uint32_t> error_bound(const Model& model, std::span<const std::uint64_t> lower_bounds,
                                       bool parallel = true);

/// Predecessor index over normalized lower bounds: max(0, #{xs <= x} - 1).
std::uint64_t step_index(std::span<const double> xs, double x) noexcept;

} // namespace ranger::rqrmi

namespace ranger {
using RqrmiModel = rqrmi::Model;
}
