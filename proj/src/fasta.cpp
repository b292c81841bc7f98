#include "ranger/fasta.hpp"

#include <cctype>
#include <fstream>
#include <limits>

#include "ranger/errors.hpp"

namespace ranger {

std::vector<RefSequence> parse_fasta(std::istream& in) {
    std::vector<RefSequence> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == ';') {
            continue;
        }
        if (line[0] == '>') {
            std::size_t b = 1;
            while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) {
                ++b;
            }
            std::size_t e = b;
            while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e]))) {
                ++e;
            }
            if (b == e) {
                throw ParseError("FASTA header without a sequence name", line_no);
            }
            if (records.size() >= std::numeric_limits<std::uint32_t>::max()) {
                throw ParseError("too many FASTA records", line_no);
            }
            RefSequence rec;
            rec.id = static_cast<std::uint32_t>(records.size());
            rec.name = line.substr(b, e - b);
            records.push_back(std::move(rec));
            continue;
        }
        if (records.empty()) {
            throw ParseError("sequence data before the first '>' header", line_no);
        }
        std::string& bases = records.back().bases;
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                continue;
            }
            if (!std::isprint(static_cast<unsigned char>(c))) {
                throw ParseError("non-printable character in sequence", line_no);
            }
            bases.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    if (in.bad()) {
        throw IoError("read failure while parsing FASTA");
    }
    return records;
}

std::vector<RefSequence> load_fasta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open FASTA file '" + path.string() + "'");
    }
    try {
        return parse_fasta(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

} // namespace ranger
