#include "ranger/minimizer.hpp"

#include <deque>
#include <limits>

#include "ranger/errors.hpp"

namespace ranger {

std::vector<MinimizerHit> extract_minimizers(std::string_view bases, unsigned k, unsigned w) {
    check_k(k);
    if (w < 1) {
        throw ParameterError("window size w must be >= 1");
    }
    if (bases.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("sequence longer than 2^32 bases");
    }
    std::vector<MinimizerHit> out;
    if (bases.size() < k) {
        return out;
    }
    out.reserve(2 * bases.size() / (w + 1) + 1);

    const std::uint64_t mask = key_mask(k);
    const unsigned shift = 2 * (k - 1);
    std::uint64_t fwd = 0;
    std::uint64_t rev = 0;
    std::size_t run = 0; // valid bases since the last invalid one

    // monotonic queue: keys strictly increase from front to back
    std::deque<MinimizerHit> window;
    bool have_last = false;
    MinimizerHit last{};

    for (std::size_t i = 0; i < bases.size(); ++i) {
        const std::uint8_t c = base_code(bases[i]);
        if (c > 3) {
            run = 0;
            window.clear();
            continue;
        }
        fwd = ((fwd << 2) | c) & mask;
        rev = (rev >> 2) | (std::uint64_t{3u - c} << shift);
        if (++run < k) {
            continue;
        }
        const auto pos = static_cast<std::uint32_t>(i + 1 - k);
        MinimizerHit hit{{fwd, static_cast<std::uint8_t>(k)}, pos, Strand::forward};
        if (rev < fwd) {
            hit.key.value = rev;
            hit.strand = Strand::reverse;
        }
        while (!window.empty() && window.back().key.value >= hit.key.value) {
            window.pop_back();
        }
        window.push_back(hit);
        while (window.front().offset + w <= pos) {
            window.pop_front();
        }
        if (run - k + 1 < w) {
            continue;
        }
        const MinimizerHit& sel = window.front();
        if (!have_last || sel.offset != last.offset || sel.key != last.key) {
            out.push_back(sel);
            last = sel;
            have_last = true;
        }
    }
    return out;
}

} // namespace ranger
