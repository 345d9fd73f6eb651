#include "doctest.h"

#include <set>

#include "democlust/engines.hpp"
#include "democlust/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace democlust;

TEST_CASE("assignments are canonical partitions") {
    const auto m = EncodedMatrix::from_values(fixtures::uniform_matrix(6, 1, 0));
    const auto a = make_assignment(m, {4, 4, kNoise, 1, 9, 1});
    CHECK(a.labels == std::vector<int>{0, 0, kNoise, 1, 2, 1});
    CHECK(a.n_clusters == 3);
    CHECK(a.cluster_sizes() == std::vector<std::size_t>{2, 2, 1});
    CHECK(a.noise_count() == 1);
    CHECK(a.clusters()[1] == std::vector<ItemId>{3, 5});
    CHECK(canonical_labels(std::vector<int>{7, 3, 7}) == std::vector<int>{0, 1, 0});
}

TEST_CASE("run_candidate dispatches every algorithm") {
    const auto b = fixtures::gaussian_blobs(30, 2, 2, 0.3, 8.0, 2);
    const auto m = EncodedMatrix::from_values(b.points);
    for (const ModelCandidate& c : {ModelCandidate{KMeansParams{2, 300, 3}, 1},
                                    ModelCandidate{AgglomerativeParams{2, Linkage::kAverage}, 1},
                                    ModelCandidate{SpectralParams{2}, 1},
                                    ModelCandidate{DbscanParams{90.0, 0.0, 4}, 1}}) {
        const auto a = run_candidate(m, c);
        CHECK(a.labels.size() == 30);
        INFO(c.label());
        CHECK(oracle::same_partition(a.labels, b.labels));
    }
}

TEST_CASE("candidate labels and tuples") {
    const ModelCandidate c{AgglomerativeParams{4, Linkage::kComplete}, 0};
    CHECK(c.label() == "agglomerative(linkage=complete,k=4)");
    CHECK(c.algorithm() == Algorithm::kAgglomerative);
    CHECK(c.k() == 4);
    CHECK_FALSE(ModelCandidate{DbscanParams{}, 0}.k());
    CHECK(ModelCandidate{KMeansParams{2, 300, 5}, 0}.param_tuple() < ModelCandidate{KMeansParams{3, 300, 5}, 0}.param_tuple());
    CHECK(algorithm_from_string("spectral") == Algorithm::kSpectral);
    CHECK(linkage_from_string("ward") == Linkage::kWard);
    CHECK_THROWS_AS(linkage_from_string("single"), Error);
}

TEST_CASE("sub-clustering rotates through distinct models") {
    const auto b = fixtures::gaussian_blobs(20, 2, 2, 0.5, 6.0, 1);
    const auto m = EncodedMatrix::from_values(b.points);
    std::vector<ItemId> members;
    for (ItemId i = 0; i < 20; ++i) members.push_back(i);

    auto first = subcluster(m, 3, members, nullptr, 0);
    CHECK(first.refresh_count == 0);
    CHECK(first.candidate.label() == "kmeans(k=2)");
    CHECK(first.assignment.item_ids == members);

    std::set<std::string> seen{first.candidate.label()};
    auto prev = first;
    for (int i = 1; i < 6; ++i) {
        auto next = subcluster(m, 3, members, &prev, 0);
        CHECK(next.refresh_count == i);
        CHECK(next.candidate.label() != prev.candidate.label());
        seen.insert(next.candidate.label());
        prev = next;
    }
    CHECK(seen.size() == 6);
    CHECK(subcluster(m, 3, members, &prev, 0).candidate.label() == "kmeans(k=2)");

    const std::vector<ItemId> three = {0, 1, 2};
    try {
        subcluster(m, 3, three, nullptr, 0);
        FAIL("expected kTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kTooSmall);
    }
}

TEST_CASE("weight zero behaves like a removed feature") {
    const auto t = ingest_csv("a,b,c\n1,5,0\n2,3,9\n8,1,4\n9,2,8\n4,4,1\n7,7,7\n3,9,2\n6,0,5\n");
    const std::vector<WeightedFeature> zero = {{"a", 1}, {"b", 0}, {"c", 2}};
    const std::vector<WeightedFeature> removed = {{"a", 1}, {"c", 2}};
    const auto mz = encode(t, zero);
    const auto mr = encode(t, removed);
    for (const ModelCandidate& c : {ModelCandidate{KMeansParams{3, 300, 5}, 4},
                                    ModelCandidate{AgglomerativeParams{3, Linkage::kWard}, 0},
                                    ModelCandidate{SpectralParams{3}, 4},
                                    ModelCandidate{DbscanParams{50.0, 0.0, 2}, 0}}) {
        CHECK(run_candidate(mz, c).labels == run_candidate(mr, c).labels);
    }
}
