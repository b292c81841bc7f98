#include "ranger/keycodec.hpp"

#include "ranger/errors.hpp"

namespace ranger {

void check_k(unsigned k) {
    if (k < 1 || k > kMaxK) {
        throw ParameterError("k must be in [1, 32], got " + std::to_string(k));
    }
}

Key64 encode_kmer(std::string_view seq, unsigned k) {
    check_k(k);
    if (seq.size() != k) {
        throw ParameterError("k-mer length " + std::to_string(seq.size()) + " does not match k=" + std::to_string(k));
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::uint8_t c = base_code(seq[i]);
        if (c > 3) {
            throw EncodingError(std::string("invalid base '") + seq[i] + "' at offset " + std::to_string(i));
        }
        value = (value << 2) | c;
    }
    return {value, static_cast<std::uint8_t>(k)};
}

std::string decode_kmer(Key64 key) {
    check_k(key.k);
    if ((key.value & ~key_mask(key.k)) != 0) {
        throw ParameterError("malformed key: bits set above 2k");
    }
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::string out(key.k, 'A');
    std::uint64_t v = key.value;
    for (std::size_t i = key.k; i-- > 0;) {
        out[i] = kBases[v & 3];
        v >>= 2;
    }
    return out;
}

Key64 revcomp(Key64 key) {
    check_k(key.k);
    if ((key.value & ~key_mask(key.k)) != 0) {
        throw ParameterError("malformed key: bits set above 2k");
    }
    return {revcomp_value(key.value, key.k), key.k};
}

} // namespace ranger
