#include "doctest.h"

#include <cmath>
#include <string>

#include "democlust/error.hpp"
#include "democlust/selection.hpp"

using namespace democlust;

namespace {

DataTable hundred() {
    std::string doc = "v,w\n";
    for (int i = 1; i <= 100; ++i) doc += std::to_string(i) + "," + std::to_string(i % 7) + "\n";
    return ingest_csv(doc);
}

}  // namespace

TEST_CASE("numeric clicks match within five percent of the range") {
    const auto t = hundred();
    const auto s = similar_by_cell(t, 49, "v");  // value 50, eps 4.95
    std::vector<ItemId> expected;
    for (ItemId i = 0; i < 100; ++i) {
        const double v = static_cast<double>(i + 1);
        if (std::abs(v - 50.0) <= 4.95) expected.push_back(i);
    }
    CHECK(s.item_ids == expected);
    CHECK(s.contains(49));
    CHECK(s.provenance == SelectionProvenance::kCellClick);
}

TEST_CASE("categorical clicks match exactly") {
    const auto t = ingest_csv("pop\nANC\nEUR\nANC\nanc\n");
    const auto s = similar_by_cell(t, 0, "pop");
    CHECK(s.item_ids == std::vector<ItemId>{0, 2});
}

TEST_CASE("chained clicks narrow and commute") {
    const auto t = hundred();
    const auto u = similar_by_cell(t, 49, "v");
    const auto v = similar_by_cell(t, 49, "w", u);
    CHECK(v.size() <= u.size());
    for (auto i : v.item_ids) CHECK(u.contains(i));
    const auto w = similar_by_cell(t, 49, "w");
    const auto x = similar_by_cell(t, 49, "v", w);
    CHECK(x.item_ids == v.item_ids);
    CHECK(similar_by_cell(t, 49, "w", v).item_ids == v.item_ids);
}

TEST_CASE("eps can be overridden per column") {
    const auto t = hundred();
    SimilarityConfig cfg;
    cfg.eps_override["v"] = 0.0;
    CHECK(similar_by_cell(t, 10, "v", std::nullopt, cfg).item_ids == std::vector<ItemId>{10});
    cfg.eps_fraction = 1.0;
    cfg.eps_override.clear();
    CHECK(similar_by_cell(t, 10, "v", std::nullopt, cfg).size() == 100);
}

TEST_CASE("selection errors") {
    const auto t = ingest_csv("v,c\n1,a\nNA,b\n3,a\n");
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::kParse;
    };
    CHECK(code_of([&] { similar_by_cell(t, 1, "v"); }) == ErrorCode::kEmptyCell);
    CHECK(code_of([&] { similar_by_cell(t, 0, "nope"); }) == ErrorCode::kUnknownFeature);
    CHECK(code_of([&] { similar_by_cell(t, 7, "v"); }) == ErrorCode::kUnknownItem);
    const auto only_b = SelectionSet::make({1}, SelectionProvenance::kLasso, 3);
    CHECK(code_of([&] { similar_by_cell(t, 0, "c", only_b); }) == ErrorCode::kEmptySelection);
    CHECK(code_of([&] { SelectionSet::make({}, SelectionProvenance::kLasso, 3); }) == ErrorCode::kEmptySelection);
}

TEST_CASE("selection sets are sorted and deduplicated") {
    const auto s = SelectionSet::make({5, 1, 5, 3}, SelectionProvenance::kRowClick, 6);
    CHECK(s.item_ids == std::vector<ItemId>{1, 3, 5});
    CHECK(selection_provenance_from_string(to_string(SelectionProvenance::kClusterPick)) ==
          SelectionProvenance::kClusterPick);
}
