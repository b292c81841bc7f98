#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ranger/errors.hpp"
#include "ranger/fasta.hpp"

using namespace ranger;

TEST_CASE("two records keep order, names and lengths") {
    std::istringstream in(">chr1 first record\nACGT\nACG\n>chr2\nTTTT\n");
    const auto recs = parse_fasta(in);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].name == "chr1");
    CHECK(recs[0].bases == "ACGTACG");
    CHECK(recs[0].id == 0);
    CHECK(recs[1].name == "chr2");
    CHECK(recs[1].bases.size() == 4);
    CHECK(recs[1].id == 1);
}

TEST_CASE("lowercase is uppercased and N runs are kept") {
    std::istringstream in(">s\r\nacgtNNNNnacg\r\n");
    const auto recs = parse_fasta(in);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].bases == "ACGTNNNNNACG");
}

TEST_CASE("malformed input reports the line") {
    std::istringstream no_name(">seq\nACGT\n>\nACGT\n");
    try {
        parse_fasta(no_name);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream headless("ACGT\n");
    CHECK_THROWS_AS(parse_fasta(headless), ParseError);
}

TEST_CASE("load_fasta reads files and reports I/O errors") {
    const auto path = std::filesystem::temp_directory_path() / "ranger_fasta_test.fa";
    {
        std::ofstream out(path);
        out << ">a\nAC\nGT\n>b\nGG\n";
    }
    const auto recs = load_fasta(path);
    CHECK(recs.size() == 2);
    CHECK(recs[0].bases == "ACGT");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_fasta(path), IoError);
}
