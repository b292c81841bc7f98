#include <random>

#include "doctest.h"
#include "nets.hpp"
#include "ranger/rqrmi.hpp"

using namespace ranger::rqrmi;
using ranger::testing::random_net;
using ranger::testing::reference_eval;

namespace {

TinyNet single_hinge() {
    // ReLU(x - 0.5) * 2 + 1
    TinyNet n;
    n.w1[0] = 1.0;
    n.b1[0] = -0.5;
    n.w2[0] = 2.0;
    n.b2 = 1.0;
    return n;
}

TinyNet linear(double slope, double intercept) {
    TinyNet n;
    n.w1[0] = 1.0;
    n.w2[0] = slope;
    n.b2 = intercept;
    return n;
}

} // namespace

TEST_CASE("nn_eval examples") {
    CHECK(nn_eval(TinyNet{}, 0.3) == 0.0);
    CHECK(nn_eval(single_hinge(), 0.25) == doctest::Approx(1.0));
    CHECK(nn_eval(single_hinge(), 1.0) == doctest::Approx(2.0));
    CHECK(nn_eval(linear(10.0, -1.0), 0.5) == doctest::Approx(4.0));
}

TEST_CASE("nn_eval agrees with the reference evaluator within the noise bound") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const TinyNet n = random_net(rng, 1e5);
        for (int j = 0; j < 50; ++j) {
            const double x = u(rng);
            REQUIRE(std::abs(nn_eval(n, x) - reference_eval(n, x)) <= output_noise(n));
        }
    }
}

TEST_CASE("select_next examples") {
    const std::uint64_t r = 1000;
    CHECK(select_next(1000.0, r, 8) == 7);
    CHECK(select_next(-3.0, r, 8) == 0);
    CHECK(select_next(500.0, r, 8) == 4);
    CHECK(select_next(124.9, r, 8) == 0);
    CHECK(select_next(125.0, r, 8) == 1);
    CHECK(select_next(1e300, r, 8) == 7);
    CHECK(select_next(std::nan(""), r, 8) == 0);
}

TEST_CASE("interval helpers") {
    IntervalSet s{{0.5, 0.7}, {0.0, 0.2}, {0.2, 0.3}, {0.6, 0.9}};
    canonicalize(s);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == Interval{0.0, 0.3});
    CHECK(s[1] == Interval{0.5, 0.9});
    CHECK(measure(s) == doctest::Approx(0.7));
    CHECK(contains(s, 0.25));
    CHECK_FALSE(contains(s, 0.4));
}

TEST_CASE("pwl_decompose examples") {
    const PwlFunction zero = pwl_decompose(TinyNet{}, {0.0, 1.0});
    CHECK(zero.breakpoints.empty());
    REQUIRE(zero.pieces.size() == 1);
    CHECK(zero.eval(0.7) == 0.0);

    const PwlFunction h = pwl_decompose(single_hinge(), {0.0, 1.0});
    REQUIRE(h.breakpoints.size() == 1);
    CHECK(h.breakpoints[0] == doctest::Approx(0.5));
    REQUIRE(h.pieces.size() == 2);
    CHECK(h.pieces[0].slope == doctest::Approx(0.0));
    CHECK(h.pieces[1].slope == doctest::Approx(2.0));

    const PwlFunction sub = pwl_decompose(single_hinge(), {0.6, 0.8});
    CHECK(sub.breakpoints.empty());
}

TEST_CASE("random nets: at most 9 pieces, exact at sample points, continuous") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const TinyNet n = random_net(rng, 1e3);
        const PwlFunction f = pwl_decompose(n, {0.0, 1.0});
        REQUIRE(f.pieces.size() <= 9);
        REQUIRE(f.pieces.size() == f.breakpoints.size() + 1);
        const double tol = output_noise(n) * 4 + 1e-9;
        for (const LinearPiece& p : f.pieces) {
            const double mid = 0.5 * (p.lo + p.hi);
            REQUIRE(std::abs(p.at(mid) - nn_eval(n, mid)) <= tol);
        }
        for (std::size_t b = 0; b < f.breakpoints.size(); ++b) {
            const double x = f.breakpoints[b];
            REQUIRE(std::abs(f.pieces[b].at(x) - f.pieces[b + 1].at(x)) <= tol);
        }
        for (int j = 0; j < 20; ++j) {
            const double x = u(rng);
            REQUIRE(std::abs(f.eval(x) - nn_eval(n, x)) <= tol);
        }
    }
}

TEST_CASE("route: constant net sends everything to one successor") {
    const std::vector<TinyNet> nets{linear(0.0, 600.0)};
    Responsibility in{{IntervalSet{{0.0, 1.0}}}};
    const Responsibility out = route(nets, in, 1000, 8, false);
    REQUIRE(out.per_net.size() == 8);
    for (std::size_t m = 0; m < 8; ++m) {
        CHECK(measure(out.per_net[m]) == doctest::Approx(m == 4 ? 1.0 : 0.0));
    }
}

TEST_CASE("route: linear net splits the unit interval into quarters") {
    const std::vector<TinyNet> nets{linear(1000.0, 0.0)};
    Responsibility in{{IntervalSet{{0.0, 1.0}}}};
    const Responsibility out = route(nets, in, 1000, 4, false);
    for (std::size_t m = 0; m < 4; ++m) {
        REQUIRE(out.per_net[m].size() == 1);
        CHECK(out.per_net[m][0].lo == doctest::Approx(0.25 * static_cast<double>(m)));
        CHECK(out.per_net[m][0].hi == doctest::Approx(0.25 * static_cast<double>(m + 1)));
    }
}

TEST_CASE("route: random hierarchies agree with point-wise routing") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t r = 5000;
        std::vector<std::vector<TinyNet>> stages{{random_net(rng, 4000)}, {}, {}};
        for (int i = 0; i < 6; ++i) stages[1].push_back(random_net(rng, 4000));
        for (int i = 0; i < 20; ++i) stages[2].push_back(random_net(rng, 4000));
        for (auto& n : stages[0]) n.b2 += 2500;
        for (auto& n : stages[1]) n.b2 += 2500;
        const Model m(stages, r, 1.0, std::vector<std::uint32_t>(20, 0));
        for (std::size_t s = 1; s < 3; ++s) {
            const Responsibility exact = m.responsibility(s, false);
            const Responsibility padded = m.responsibility(s, true);
            double total = 0;
            for (const auto& set : exact.per_net) total += measure(set);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
            for (int i = 0; i < 10000; ++i) {
                const double x = u(rng);
                const std::size_t net = m.route_to(s, x);
                REQUIRE(contains(padded.per_net[net], x));
            }
        }
    }
}
