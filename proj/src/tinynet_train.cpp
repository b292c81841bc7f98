#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ranger/tinynet_fit.hpp"

namespace ranger::rqrmi {

namespace {

constexpr std::size_t kFeatures = kHidden + 1;
constexpr unsigned kLawsonIterations = 30;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

/// Solves (A + ridge) x = b for a small dense symmetric system, partial pivoting.
std::array<double, kFeatures> solve(std::array<std::array<double, kFeatures>, kFeatures> a,
                                    std::array<double, kFeatures> b) {
    double trace = 0.0;
    for (std::size_t i = 0; i < kFeatures; ++i) {
        trace += a[i][i];
    }
    const double ridge = 1e-12 * (trace / kFeatures) + 1e-300;
    for (std::size_t i = 0; i < kFeatures; ++i) {
        a[i][i] += ridge;
    }
    for (std::size_t col = 0; col < kFeatures; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < kFeatures; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) {
            continue;
        }
        for (std::size_t r = col + 1; r < kFeatures; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < kFeatures; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::array<double, kFeatures> x{};
    for (std::size_t i = kFeatures; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < kFeatures; ++c) {
            s -= a[i][c] * x[c];
        }
        x[i] = a[i][i] == 0.0 ? 0.0 : s / a[i][i];
    }
    return x;
}

/// Re-solves the output layer (w2, b2) by (weighted) least squares, hidden layer fixed.
void refit_output(TinyNet& net, std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> weights = {}) {
    std::array<std::array<double, kFeatures>, kFeatures> ata{};
    std::array<double, kFeatures> atb{};
    std::array<double, kFeatures> phi{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < kHidden; ++j) {
            const double a = net.w1[j] * xs[i] + net.b1[j];
            phi[j] = a > 0.0 ? a : 0.0;
        }
        phi[kHidden] = 1.0;
        const double wt = weights.empty() ? 1.0 : weights[i];
        if (wt == 0.0) {
            continue;
        }
        for (std::size_t r = 0; r < kFeatures; ++r) {
            const double wp = wt * phi[r];
            atb[r] += wp * ys[i];
            for (std::size_t c = r; c < kFeatures; ++c) {
                ata[r][c] += wp * phi[c];
            }
        }
    }
    for (std::size_t r = 0; r < kFeatures; ++r) {
        for (std::size_t c = 0; c < r; ++c) {
            ata[r][c] = ata[c][r];
        }
    }
    const auto sol = solve(ata, atb);
    if (!std::all_of(sol.begin(), sol.end(), [](double v) { return std::isfinite(v); })) {
        return;
    }
    std::copy_n(sol.begin(), kHidden, net.w2.begin());
    net.b2 = sol[kHidden];
}

TinyNet constant_net(double v) {
    TinyNet net;
    net.b2 = to_float_precision(v);
    return net;
}

double max_abs_error(const TinyNet& net, std::span<const double> xs, std::span<const double> ys) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m = std::max(m, std::abs(nn_eval(net, xs[i]) - ys[i]));
    }
    return m;
}

// Lawson's reweighting: drives the output layer toward the minimax fit.
void minimax_output(TinyNet& net, std::span<const double> xs, std::span<const double> ys, unsigned iterations) {
    std::vector<double> wt(xs.size(), 1.0 / static_cast<double>(xs.size()));
    refit_output(net, xs, ys);
    TinyNet best = net;
    double best_err = max_abs_error(net, xs, ys);
    for (unsigned it = 0; it < iterations; ++it) {
        double total = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            wt[i] *= std::abs(nn_eval(net, xs[i]) - ys[i]);
            total += wt[i];
        }
        if (!(total > 0.0) || !std::isfinite(total)) {
            break;
        }
        for (double& w : wt) {
            w /= total;
        }
        refit_output(net, xs, ys, wt);
        const double err = max_abs_error(net, xs, ys);
        if (net.finite() && err < best_err) {
            best = net;
            best_err = err;
        }
    }
    net = best;
}

TinyNet knot_net(const std::array<double, kHidden>& knots) {
    TinyNet net;
    for (std::size_t j = 0; j < kHidden; ++j) {
        net.w1[j] = 1.0;
        net.b1[j] = -knots[j];
    }
    return net;
}

// Pattern search over hinge positions in [0, 1); the output layer is re-solved
// by least squares for every candidate and scored by its worst sample error.
TinyNet refine_knots(std::array<double, kHidden> knots, std::span<const double> us, std::span<const double> ts) {
    auto score = [&](const std::array<double, kHidden>& k, TinyNet& net) {
        net = knot_net(k);
        refit_output(net, us, ts);
        return net.finite() ? max_abs_error(net, us, ts) : std::numeric_limits<double>::infinity();
    };
    TinyNet best;
    double best_err = score(knots, best);
    TinyNet cand;
    for (double step = 1.0 / 32; step > 1.0 / 8192; step /= 2) {
        bool improved = true;
        for (int sweep = 0; improved && sweep < 8; ++sweep) {
            improved = false;
            for (std::size_t j = 0; j < kHidden; ++j) {
                for (double dir : {-1.0, 1.0}) {
                    auto k = knots;
                    k[j] = std::clamp(k[j] + dir * step, 0.0, 1.0 - 1.0 / 8192);
                    const double err = score(k, cand);
                    if (err < best_err) {
                        best_err = err;
                        best = cand;
                        knots = k;
                        improved = true;
                    }
                }
            }
        }
    }
    return best;
}

void sgd(TinyNet& net, std::span<const double> us, std::span<const double> ts, const FitConfig& cfg,
         std::mt19937_64& rng) {
    const std::size_t n = us.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch, n));
    constexpr double kPi = 3.14159265358979323846;

    for (unsigned epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[rng() % i]);
        }
        const double lr = cfg.learning_rate * 0.5 * (1.0 + std::cos(kPi * epoch / cfg.epochs));
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(n, start + batch);
            TinyNet g;
            for (std::size_t s = start; s < end; ++s) {
                const double u = us[order[s]];
                std::array<double, kHidden> a{};
                double y = net.b2;
                for (std::size_t j = 0; j < kHidden; ++j) {
                    a[j] = net.w1[j] * u + net.b1[j];
                    y += net.w2[j] * (a[j] > 0.0 ? a[j] : 0.0);
                }
                const double e = y - ts[order[s]];
                g.b2 += e;
                for (std::size_t j = 0; j < kHidden; ++j) {
                    if (a[j] > 0.0) {
                        g.w2[j] += e * a[j];
                        g.w1[j] += e * net.w2[j] * u;
                        g.b1[j] += e * net.w2[j];
                    }
                }
            }
            const double step = lr / static_cast<double>(end - start);
            for (std::size_t j = 0; j < kHidden; ++j) {
                net.w1[j] -= step * g.w1[j];
                net.b1[j] -= step * g.b1[j];
                net.w2[j] -= step * g.w2[j];
            }
            net.b2 -= step * g.b2;
        }
    }
}

} // namespace

double mse(const TinyNet& net, std::span<const double> xs, std::span<const double> ys) noexcept {
    if (xs.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = nn_eval(net, xs[i]) - ys[i];
        s += e * e;
    }
    return s / static_cast<double>(xs.size());
}

TinyNet fit_net(std::span<const double> xs, std::span<const double> ys, const FitConfig& config, std::uint64_t seed) {
    if (xs.empty()) {
        return {};
    }
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double x0 = *xmin_it;
    const double xspan = *xmax_it - x0;
    const double y0 = *ymin_it;
    const double yspan = *ymax_it - y0;
    if (yspan == 0.0 || xspan == 0.0) {
        return constant_net(y0 + yspan / 2);
    }

    // local coordinates: u, t in [0, 1]
    std::vector<double> us(xs.size());
    std::vector<double> ts(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        us[i] = (xs[i] - x0) / xspan;
        ts[i] = (ys[i] - y0) / yspan;
    }

    std::mt19937_64 rng(seed);
    std::vector<double> sorted = us;
    std::sort(sorted.begin(), sorted.end());
    std::array<double, kHidden> knots{};
    for (std::size_t j = 1; j < kHidden; ++j) {
        // unit 0 hinges at the left edge (a linear term); the rest at jittered quantiles
        const double q = (static_cast<double>(j) + 0.5 * (uniform01(rng) - 0.5)) / kHidden;
        knots[j] = sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
    }

    // candidates: refined hinges, and SGD from the quantile start; keep the smaller worst-case error
    TinyNet best = refine_knots(knots, us, ts);
    minimax_output(best, us, ts, kLawsonIterations);
    double best_err = max_abs_error(best, us, ts);
    if (config.epochs > 0) {
        TinyNet net = knot_net(knots);
        refit_output(net, us, ts);
        sgd(net, us, ts, config, rng);
        if (net.finite()) {
            minimax_output(net, us, ts, kLawsonIterations);
            const double err = max_abs_error(net, us, ts);
            if (net.finite() && err < best_err) {
                best = net;
                best_err = err;
            }
        }
    }

    // fold local scaling into the parameters, round the hidden layer, re-solve the output layer
    TinyNet out;
    for (std::size_t j = 0; j < kHidden; ++j) {
        out.w1[j] = to_float_precision(best.w1[j] / xspan);
        out.b1[j] = to_float_precision(best.b1[j] - best.w1[j] * x0 / xspan);
        out.w2[j] = best.w2[j] * yspan;
    }
    out.b2 = best.b2 * yspan + y0;
    minimax_output(out, xs, ys, kLawsonIterations);
    for (std::size_t j = 0; j < kHidden; ++j) {
        out.w2[j] = to_float_precision(out.w2[j]);
    }
    out.b2 = to_float_precision(out.b2);
    if (!out.finite()) {
        return constant_net(y0 + yspan / 2);
    }
    return out;
}

} // namespace ranger::rqrmi
