#include <algorithm>
#include <random>

#include "doctest.h"
#include "ranger/rqrmi.hpp"

using namespace ranger::rqrmi;

TEST_CASE("1e6 clustered bounds with widths 1-8-119") {
    // k = 20: domain 2^40; half the bounds inside the bottom 1%
    const unsigned k = 20;
    const std::uint64_t domain = 1ull << 40;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::uint64_t> low(0, domain / 100 - 1);
    std::uniform_int_distribution<std::uint64_t> high(domain / 100, domain - 1);
    std::vector<std::uint64_t> lbs{0};
    while (lbs.size() < 1'000'000) {
        lbs.push_back(lbs.size() % 2 ? low(rng) : high(rng));
        if (lbs.size() % 100'000 == 0 || lbs.size() == 1'000'000) {
            std::sort(lbs.begin(), lbs.end());
            lbs.erase(std::unique(lbs.begin(), lbs.end()), lbs.end());
        }
    }
    TrainConfig c;
    c.max_trials = 1;
    TrainLog log;
    const Model m = train(lbs, k, c, &log);
    CHECK(log.widths_used == std::vector<std::size_t>{1, 8, 119});
    MESSAGE("certified max leaf error " << m.max_error() << " over " << lbs.size() << " ranges");

    auto check = [&](std::uint64_t q) {
        const auto it = std::upper_bound(lbs.begin(), lbs.end(), q);
        const std::int64_t t = (it - lbs.begin()) - 1;
        const Inference inf = m.infer(q);
        REQUIRE(std::llabs(inf.estimate - t) <= static_cast<std::int64_t>(inf.error));
    };
    // every breakpoint of the step function, from both sides
    for (std::uint64_t lb : lbs) {
        check(lb);
        if (lb > 0) check(lb - 1);
    }
    // stratified sample: 1e6 strata over the domain, one uniform key in each
    const std::uint64_t stratum = domain / 1'000'000;
    for (std::uint64_t s = 0; s < 1'000'000; ++s) {
        check(s * stratum + rng() % stratum);
    }
    check(domain - 1);
}
