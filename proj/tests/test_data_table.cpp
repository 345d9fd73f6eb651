#include "doctest.h"

#include <cmath>

#include "democlust/data_table.hpp"
#include "democlust/error.hpp"

using namespace democlust;

TEST_CASE("type inference and statistics") {
    const auto t = ingest_csv("chr,region\n1,Africa\n2,Africa\n9,America\n11,Europe\n");
    REQUIRE(t.n_rows() == 4);
    REQUIRE(t.n_columns() == 2);
    const auto& chr = t.column(0);
    CHECK(chr.kind == ColumnKind::kNumeric);
    CHECK(chr.min == 1.0);
    CHECK(chr.max == 11.0);
    CHECK(chr.mean == doctest::Approx(5.75));
    CHECK(chr.stddev >= 0.0);
    const auto& region = t.column(1);
    CHECK(region.kind == ColumnKind::kCategorical);
    CHECK(region.categories == std::vector<std::string>{"Africa", "America", "Europe"});
    CHECK(t.category(2, 1) == 1);
    CHECK(t.raw(3, 1) == "Europe");
}

TEST_CASE("missing tokens keep a numeric column numeric") {
    const auto t = ingest_csv("v,w\n1,a\nNA,\n3,nan\n nan ,b\n");
    CHECK(t.column(0).kind == ColumnKind::kNumeric);
    CHECK(t.column(0).missing_count == 2);
    CHECK(std::isnan(t.numeric(1, 0)));
    CHECK(t.is_missing(1, 0));
    CHECK(t.column(1).kind == ColumnKind::kCategorical);
    CHECK(t.column(1).missing_count == 2);
    CHECK(t.category(1, 1) == DataTable::kMissingCategory);
    CHECK(t.column(1).categories.size() == 2);
}

TEST_CASE("one non-number makes a column categorical") {
    const auto t = ingest_csv("x\n1\n2\nthree\n");
    CHECK(t.column(0).kind == ColumnKind::kCategorical);
    CHECK(t.column(0).categories.size() == 3);
}

TEST_CASE("number parsing") {
    CHECK(parse_number("+1.5e2") == 150.0);
    CHECK(parse_number(" -3 ") == -3.0);
    CHECK_FALSE(parse_number("inf"));
    CHECK_FALSE(parse_number("1.2.3"));
    CHECK_FALSE(parse_number(""));
    CHECK(is_missing_token("  Na "));
    CHECK_FALSE(is_missing_token("N/A"));
}

TEST_CASE("empty inputs") {
    CHECK_THROWS_AS(ingest_csv(""), Error);
    try {
        ingest_csv("a,b\n");
        FAIL("header-only file must fail");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kEmptyInput);
    }
}

TEST_CASE("column lookup and stable identifiers") {
    const auto t = ingest_csv("a;b\n1;2\n", {';'});
    CHECK(t.column_index("b") == 1);
    CHECK_FALSE(t.find_column("c"));
    CHECK_THROWS_AS(t.column_index("c"), Error);
    CHECK(t.id() == ingest_csv("a;b\n1;2\n", {';'}).id());
    CHECK(t.id() != ingest_csv("a;b\n1;3\n", {';'}).id());
}
