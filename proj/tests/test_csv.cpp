#include "doctest.h"

#include "democlust/csv.hpp"
#include "democlust/error.hpp"

using namespace democlust;

TEST_CASE("csv parses quoted fields, CRLF and a missing final newline") {
    const auto r = csv::parse("a,b\r\n\"x,y\",\"he said \"\"hi\"\"\"\r\n1,\n2,3");
    REQUIRE(r.size() == 4);
    CHECK(r[1][0] == "x,y");
    CHECK(r[1][1] == "he said \"hi\"");
    CHECK(r[2][1] == "");
    CHECK(r[3][1] == "3");
}

TEST_CASE("csv keeps line breaks inside quotes") {
    const auto r = csv::parse("a\n\"line1\nline2\"\n");
    REQUIRE(r.size() == 2);
    CHECK(r[1][0] == "line1\nline2");
}

TEST_CASE("csv strips a byte order mark and skips blank lines") {
    const auto r = csv::parse("\xEF\xBB\xBFh1,h2\n\n1,2\n\n");
    REQUIRE(r.size() == 2);
    CHECK(r[0][0] == "h1");
}

TEST_CASE("csv reports malformed input with a position") {
    SUBCASE("ragged row") {
        try {
            csv::parse("a,b\n1,2\n3\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.row() == 3);
            CHECK(e.code() == ErrorCode::kParse);
        }
    }
    SUBCASE("unterminated quote") { CHECK_THROWS_AS(csv::parse("a\n\"abc\n"), ParseError); }
    SUBCASE("quote inside unquoted field") { CHECK_THROWS_AS(csv::parse("a\nab\"c\n"), ParseError); }
    SUBCASE("text after closing quote") { CHECK_THROWS_AS(csv::parse("a\n\"ab\"c\n"), ParseError); }
}

TEST_CASE("csv escaping round-trips") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
    std::string doc;
    csv::append_record(doc, fields);
    CHECK(doc.ends_with("\r\n"));
    const auto back = csv::parse(doc);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == fields);
    CHECK(csv::escape_field("a;b", ';') == "\"a;b\"");
}
