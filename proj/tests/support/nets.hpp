#pragma once

#include <random>

#include "ranger/rqrmi.hpp"

namespace ranger::testing {

/// Straightforward long-double evaluation, summing hidden units in reverse order.
inline double reference_eval(const rqrmi::TinyNet& net, double x) {
    long double acc = net.b2;
    for (std::size_t i = rqrmi::kHidden; i-- > 0;) {
        const long double pre = static_cast<long double>(net.w1[i]) * x + net.b1[i];
        if (pre > 0) {
            acc += static_cast<long double>(net.w2[i]) * pre;
        }
    }
    return static_cast<double>(acc);
}

/// Net with hinges spread over (roughly) [0, 1] and float-representable parameters.
inline rqrmi::TinyNet random_net(std::mt19937_64& rng, double out_scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    rqrmi::TinyNet n;
    for (std::size_t i = 0; i < rqrmi::kHidden; ++i) {
        n.w1[i] = static_cast<float>(u(rng) * 4.0);
        n.b1[i] = static_cast<float>(-n.w1[i] * (0.5 + 0.6 * u(rng)));
        n.w2[i] = static_cast<float>(u(rng) * out_scale);
    }
    n.b2 = static_cast<float>(u(rng) * out_scale);
    return n;
}

} // namespace ranger::testing
