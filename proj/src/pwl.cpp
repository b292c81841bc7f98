#include <algorithm>
#include <cmath>
#include <limits>

#include "ranger/rqrmi.hpp"

namespace ranger::rqrmi {

bool TinyNet::finite() const noexcept {
    auto ok = [](const auto& a) { return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }); };
    return ok(w1) && ok(b1) && ok(w2) && std::isfinite(b2);
}

double nn_eval(const TinyNet& net, double x) noexcept {
    double y = net.b2;
    for (std::size_t j = 0; j < kHidden; ++j) {
        const double a = net.w1[j] * x + net.b1[j];
        y += net.w2[j] * (a > 0.0 ? a : 0.0);
    }
    return y;
}

double output_noise(const TinyNet& net) noexcept {
    double s = std::abs(net.b2);
    for (std::size_t j = 0; j < kHidden; ++j) {
        s += std::abs(net.w2[j]) * (std::abs(net.w1[j]) + std::abs(net.b1[j]));
    }
    return 1e-12 * s + std::numeric_limits<double>::denorm_min();
}

std::size_t select_next(double estimate, std::uint64_t range_count, std::size_t width) noexcept {
    const double v = std::floor(estimate / static_cast<double>(range_count) * static_cast<double>(width));
    if (!(v > 0.0)) {
        return 0;
    }
    if (v >= static_cast<double>(width - 1)) {
        return width - 1;
    }
    return static_cast<std::size_t>(v);
}

void canonicalize(IntervalSet& set) {
    std::sort(set.begin(), set.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (out > 0 && set[i].lo <= set[out - 1].hi) {
            set[out - 1].hi = std::max(set[out - 1].hi, set[i].hi);
        } else {
            set[out++] = set[i];
        }
    }
    set.resize(out);
}

double measure(const IntervalSet& set) noexcept {
    double m = 0.0;
    for (const Interval& i : set) {
        m += i.hi - i.lo;
    }
    return m;
}

bool contains(const IntervalSet& set, double x) noexcept {
    auto it = std::upper_bound(set.begin(), set.end(), x, [](double v, const Interval& i) { return v < i.lo; });
    return it != set.begin() && x <= std::prev(it)->hi;
}

double PwlFunction::eval(double x) const noexcept {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    return pieces[static_cast<std::size_t>(it - breakpoints.begin())].at(x);
}

PwlFunction pwl_decompose(const TinyNet& net, Interval domain) {
    PwlFunction f;
    f.domain = domain;
    for (std::size_t j = 0; j < kHidden; ++j) {
        if (net.w1[j] == 0.0) {
            continue;
        }
        const double h = -net.b1[j] / net.w1[j];
        if (h > domain.lo && h < domain.hi) {
            f.breakpoints.push_back(h);
        }
    }
    std::sort(f.breakpoints.begin(), f.breakpoints.end());
    f.breakpoints.erase(std::unique(f.breakpoints.begin(), f.breakpoints.end()), f.breakpoints.end());

    for (std::size_t p = 0; p <= f.breakpoints.size(); ++p) {
        const double lo = p == 0 ? domain.lo : f.breakpoints[p - 1];
        const double hi = p == f.breakpoints.size() ? domain.hi : f.breakpoints[p];
        const double mid = lo + (hi - lo) / 2;
        LinearPiece piece{lo, hi, 0.0, net.b2};
        for (std::size_t j = 0; j < kHidden; ++j) {
            if (net.w1[j] * mid + net.b1[j] > 0.0) {
                piece.slope += net.w2[j] * net.w1[j];
                piece.intercept += net.w2[j] * net.b1[j];
            }
        }
        f.pieces.push_back(piece);
    }
    return f;
}

Responsibility route(std::span<const TinyNet> nets, const Responsibility& inputs, std::uint64_t range_count,
                     std::size_t next_width, bool conservative) {
    Responsibility out;
    out.per_net.resize(next_width);
    const double r = static_cast<double>(range_count);
    const double w = static_cast<double>(next_width);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    for (std::size_t n = 0; n < nets.size() && n < inputs.per_net.size(); ++n) {
        const IntervalSet& in = inputs.per_net[n];
        if (next_width == 1) {
            out.per_net[0].insert(out.per_net[0].end(), in.begin(), in.end());
            continue;
        }
        const double pad = conservative ? output_noise(nets[n]) + 1e-12 * r : 0.0;
        for (const Interval& dom : in) {
            const PwlFunction f = pwl_decompose(nets[n], dom);
            for (const LinearPiece& p : f.pieces) {
                const double ya = p.at(p.lo);
                const double yb = p.at(p.hi);
                const std::size_t m_lo = select_next(std::min(ya, yb) - pad, range_count, next_width);
                const std::size_t m_hi = select_next(std::max(ya, yb) + pad, range_count, next_width);
                for (std::size_t m = m_lo; m <= m_hi; ++m) {
                    if (p.slope == 0.0) {
                        out.per_net[m].push_back({p.lo, p.hi});
                        continue;
                    }
                    // owner m  <=>  m*R/W <= y < (m+1)*R/W, open-ended at both extremes
                    const double t_lo = m == 0 ? -kInf : static_cast<double>(m) * r / w - pad;
                    const double t_hi = m + 1 == next_width ? kInf : static_cast<double>(m + 1) * r / w + pad;
                    double x0 = (t_lo - p.intercept) / p.slope;
                    double x1 = (t_hi - p.intercept) / p.slope;
                    if (x0 > x1) {
                        std::swap(x0, x1);
                    }
                    const double lo = std::max(p.lo, x0);
                    const double hi = std::min(p.hi, x1);
                    if (lo <= hi) {
                        out.per_net[m].push_back({lo, hi});
                    }
                }
            }
        }
    }
    for (IntervalSet& s : out.per_net) {
        canonicalize(s);
    }
    return out;
}

} // namespace ranger::rqrmi
