#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace ranger {

struct RefSequence {
    std::uint32_t id = 0;
    std::string name;
    std::string bases; // uppercased, line breaks removed; non-ACGT kept verbatim
};

/// Parses FASTA text. Record order is preserved and ids are assigned 0, 1, ...
std::vector<RefSequence> parse_fasta(std::istream& in);
std::vector<RefSequence> load_fasta(const std::filesystem::path& path);

} // namespace ranger
