#include "doctest.h"

#include "democlust/error.hpp"
#include "democlust/layout.hpp"

using namespace democlust;

namespace {

ErrorCode code_of(WorkingLayout& l, DemonstrationOp op) {
    try {
        l.apply(std::move(op));
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("create, merge, split, remove") {
    WorkingLayout l(10);
    CHECK(l.unassigned().size() == 10);
    const auto a = *l.apply(DemonstrationOp::create_from_selection({0, 1, 2})).created;
    const auto b = *l.apply(DemonstrationOp::create_from_selection({3, 4})).created;
    CHECK(l.cluster(a).color_tag == 0);
    CHECK(l.cluster(b).color_tag == 1);
    CHECK(l.assigned_count() == 5);

    // stealing items from an existing cluster
    const auto c = *l.apply(DemonstrationOp::create_from_selection({2, 3, 5})).created;
    CHECK(l.cluster(a).members == std::vector<ItemId>{0, 1});
    CHECK(l.cluster(b).members == std::vector<ItemId>{4});
    CHECK(l.cluster_of(5) == c);

    l.apply(DemonstrationOp::merge(a, b));
    CHECK_FALSE(l.has_cluster(a));
    CHECK(l.cluster(b).members == std::vector<ItemId>{0, 1, 4});
    CHECK(l.cluster(b).color_tag == 1);

    const auto d = *l.apply(DemonstrationOp::split_out(b, {0, 4})).created;
    CHECK(l.cluster(b).members == std::vector<ItemId>{1});
    CHECK(l.cluster(d).color_tag == 0);
    CHECK(d > c);

    l.apply(DemonstrationOp::remove_items({1}));
    CHECK_FALSE(l.has_cluster(b));
    CHECK(l.is_deleted(1));
    l.apply(DemonstrationOp::remove_cluster(c));
    CHECK(l.deleted() == std::vector<ItemId>{1, 2, 3, 5});
    CHECK(l.active_items().size() == 6);
    CHECK(l.history().size() == 7);
}

TEST_CASE("splitting out a whole cluster is a no-op") {
    WorkingLayout l(4);
    const auto a = *l.apply(DemonstrationOp::create_from_selection({0, 1})).created;
    const auto r = l.apply(DemonstrationOp::split_out(a, {1, 0}));
    CHECK(r.no_op);
    CHECK(l.history().size() == 1);
    CHECK(l.cluster(a).members == std::vector<ItemId>{0, 1});
}

TEST_CASE("invalid ops leave the layout untouched") {
    WorkingLayout l(5);
    const auto a = *l.apply(DemonstrationOp::create_from_selection({0, 1})).created;
    l.apply(DemonstrationOp::remove_items({4}));
    const WorkingLayout before = l;
    CHECK(code_of(l, DemonstrationOp::create_from_selection({})) == ErrorCode::kEmptySelection);
    CHECK(code_of(l, DemonstrationOp::create_from_selection({9})) == ErrorCode::kUnknownItem);
    CHECK(code_of(l, DemonstrationOp::create_from_selection({2, 4})) == ErrorCode::kInvalidArgument);
    CHECK(code_of(l, DemonstrationOp::merge(a, a)) == ErrorCode::kInvalidArgument);
    CHECK(code_of(l, DemonstrationOp::merge(a, 77)) == ErrorCode::kUnknownCluster);
    CHECK(code_of(l, DemonstrationOp::split_out(77, {2})) == ErrorCode::kUnknownCluster);
    CHECK(code_of(l, DemonstrationOp::remove_cluster(77)) == ErrorCode::kUnknownCluster);
    CHECK(code_of(l, DemonstrationOp::set_weights({{"x", 0}})) == ErrorCode::kEmptyFeatures);
    CHECK(code_of(l, DemonstrationOp::load_recommendation("m", {{0, 1}, {1, 2}})) ==
          ErrorCode::kInvalidArgument);
    CHECK(l == before);
    CHECK(l.history().size() == before.history().size());
}

TEST_CASE("load_recommendation replaces the clusters") {
    WorkingLayout l(6);
    l.apply(DemonstrationOp::create_from_selection({0, 1, 2}));
    l.apply(DemonstrationOp::remove_items({5}));
    l.apply(DemonstrationOp::load_recommendation("kmeans(k=2)", {{0, 3}, {1, 2}}));
    REQUIRE(l.clusters().size() == 2);
    CHECK(l.clusters()[0].origin == ClusterOrigin::kModel);
    CHECK(l.clusters()[0].members == std::vector<ItemId>{0, 3});
    CHECK(l.clusters()[0].color_tag == 0);
    CHECK(l.unassigned() == std::vector<ItemId>{4});
    CHECK(l.is_deleted(5));
}

TEST_CASE("replay rebuilds an equal layout") {
    WorkingLayout l(8);
    const auto a = *l.apply(DemonstrationOp::create_from_selection({0, 1, 2, 3})).created;
    const auto b = *l.apply(DemonstrationOp::create_from_selection({4, 5})).created;
    l.apply(DemonstrationOp::set_weights({{"x", 2}, {"y", 0}}));
    l.apply(DemonstrationOp::split_out(a, {3}));
    l.apply(DemonstrationOp::merge(b, a));
    l.apply(DemonstrationOp::remove_items({7}));
    const auto r = WorkingLayout::replay(8, l.history());
    CHECK(r == l);
    CHECK(r.weights() == l.weights());
}

TEST_CASE("derive_truth") {
    WorkingLayout l(6);
    CHECK_THROWS_AS(derive_truth(l), Error);
    l.apply(DemonstrationOp::create_from_selection({4, 5}));
    l.apply(DemonstrationOp::create_from_selection({0}));
    const auto t = derive_truth(l);
    CHECK(t.labels == std::map<ItemId, int>{{4, 0}, {5, 0}, {0, 1}});
    CHECK(t.m() == 2);
}
