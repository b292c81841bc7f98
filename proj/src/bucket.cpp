#include "ranger/bucket.hpp"

#include <string>

#include "ranger/errors.hpp"

namespace ranger {

std::uint64_t pack_position(const Position& p, ValueWidth w) {
    const std::uint64_t strand = p.strand == Strand::reverse ? 1 : 0;
    if (w == ValueWidth::bits64) {
        if (p.seq >= (1u << 31)) {
            throw BuildError("sequence id " + std::to_string(p.seq) + " does not fit 31 bits");
        }
        return (std::uint64_t{p.seq} << 33) | (std::uint64_t{p.offset} << 1) | strand;
    }
    if (p.seq != 0) {
        throw BuildError("32-bit values support single-sequence references only");
    }
    if (p.offset >= (1u << 31)) {
        throw BuildError("offset " + std::to_string(p.offset) + " does not fit 31 bits");
    }
    return (std::uint64_t{p.offset} << 1) | strand;
}

Position unpack_position(std::uint64_t v, ValueWidth w) noexcept {
    Position p;
    p.strand = (v & 1) ? Strand::reverse : Strand::forward;
    if (w == ValueWidth::bits64) {
        p.offset = static_cast<std::uint32_t>(v >> 1);
        p.seq = static_cast<std::uint32_t>(v >> 33);
    } else {
        p.offset = static_cast<std::uint32_t>((v & 0xFFFFFFFFu) >> 1);
    }
    return p;
}

} // namespace ranger
