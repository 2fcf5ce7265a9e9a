#include "gradekit/csv.hpp"
#include "gradekit/decimal.hpp"
#include "gradekit/errors.hpp"

#include <doctest.h>

#include <random>

using namespace gradekit;

TEST_CASE("csv parses quoted fields, CRLF and a byte order mark")
{
    auto t = csv::parse("\xEF\xBB\xBF"
                        "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",\r\n");
    REQUIRE(t.header == csv::Record{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == csv::Record{"x, y", "say \"hi\""});
    CHECK(t.rows[1] == csv::Record{"multi\nline", ""});
    CHECK(t.record_numbers == std::vector<std::size_t>{2, 3});
}

TEST_CASE("csv skips blank lines but keeps record numbering")
{
    auto t = csv::parse("a\n\nx\n\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.record_numbers[0] == 3);
}

TEST_CASE("csv rejects malformed input")
{
    CHECK_THROWS_AS(csv::parse(""), MalformedTable);
    CHECK_THROWS_AS(csv::parse("a,b\n1,2,3\n"), MalformedTable);
    CHECK_THROWS_AS(csv::parse("a\n\"open"), MalformedTable);
    CHECK_THROWS_AS(csv::parse("a\n\"x\"y\n"), MalformedTable);
    CHECK_THROWS_AS(csv::parse("a\nx\"y\n"), MalformedTable);
}

TEST_CASE("csv format/parse round trip on random records")
{
    std::mt19937 rng(7);
    const std::string alphabet = "ab ,\"\n\r;x";
    for (int iter = 0; iter < 200; ++iter) {
        std::size_t width = 1 + rng() % 4;
        csv::Record header;
        for (std::size_t c = 0; c < width; ++c) {
            header.push_back("h" + std::to_string(c));
        }
        std::vector<csv::Record> rows(rng() % 4);
        for (auto& row : rows) {
            for (std::size_t c = 0; c < width; ++c) {
                std::string f;
                for (std::size_t k = rng() % 6; k > 0; --k) {
                    f.push_back(alphabet[rng() % alphabet.size()]);
                }
                row.push_back(f);
            }
        }
        auto t = csv::parse(csv::format_table(header, rows));
        CHECK(t.header == header);
        CHECK(t.rows == rows);
    }
}

TEST_CASE("decimal parsing and rendering")
{
    CHECK(Decimal::parse("0.75")->units() == 7500);
    CHECK(Decimal::parse("10")->str() == "10");
    CHECK(Decimal::parse("-0.25")->str() == "-0.25");
    CHECK(Decimal::parse(".5")->str() == "0.5");
    CHECK(Decimal::parse("1.2300")->str() == "1.23");
    CHECK(Decimal::parse("+2")->str() == "2");
    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("1."));
    CHECK_FALSE(Decimal::parse("1.23456"));
    CHECK_FALSE(Decimal::parse("abc"));
    CHECK_FALSE(Decimal::parse("1e3"));
    CHECK_FALSE(Decimal::parse("1,5"));
    CHECK((*Decimal::parse("10") - *Decimal::parse("0.75")).str() == "9.25");
    CHECK((*Decimal::parse("1") - *Decimal::parse("0.5") - *Decimal::parse("0.75")).str() == "-0.25");
}
