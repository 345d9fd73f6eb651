#include "doctest.h"

#include "democlust/engines.hpp"
#include "democlust/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace democlust;

namespace {

EncodedMatrix column(std::vector<double> v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return EncodedMatrix::from_values(std::move(m));
}

}  // namespace

TEST_CASE("k-means on {0,1,10,11} finds the optimal 2-partition") {
    const auto m = column({0, 1, 10, 11});
    const auto run = run_kmeans(m, 2, 300, 7, 5);
    const auto [cost, best] = oracle::exhaustive_kmeans({{0}, {1}, {10}, {11}}, 2);
    CHECK(run.assignment.inertia == doctest::Approx(cost));
    CHECK(run.assignment.inertia == doctest::Approx(1.0));
    CHECK(oracle::same_partition(run.assignment.labels, best));
    CHECK(run.assignment.centroids(0, 0) + run.assignment.centroids(1, 0) == doctest::Approx(11.0));
}

TEST_CASE("k = n gives singletons and zero inertia") {
    const auto m = column({3, -1, 8, 2, 5});
    const auto run = run_kmeans(m, 5, 300, 1);
    CHECK(run.assignment.n_clusters == 5);
    CHECK(run.assignment.inertia == 0.0);
}

TEST_CASE("duplicate points trigger an empty-cluster repair") {
    const auto run = run_kmeans(column({5, 5, 5, 5}), 2, 300, 0);
    CHECK(run.empty_cluster_repairs >= 1);
    CHECK(run.assignment.inertia == 0.0);
    CHECK(run.assignment.n_clusters == 2);
}

TEST_CASE("inertia never increases across iterations") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = EncodedMatrix::from_values(fixtures::uniform_matrix(40, 3, seed));
        const auto run = run_kmeans(m, 4, 300, seed, 3);
        for (std::size_t i = 1; i < run.inertia_history.size(); ++i) {
            CHECK(run.inertia_history[i] <= run.inertia_history[i - 1] + 1e-12);
        }
        CHECK(run.assignment.inertia == doctest::Approx(run.inertia_history.back()));
    }
}

TEST_CASE("k-means is reproducible and honours its preconditions") {
    const auto m = EncodedMatrix::from_values(fixtures::uniform_matrix(30, 2, 4));
    CHECK(run_kmeans(m, 3, 300, 9, 2).assignment.labels == run_kmeans(m, 3, 300, 9, 2).assignment.labels);
    CHECK_THROWS_AS(run_kmeans(m, 31, 300, 0), Error);
    CHECK_THROWS_AS(run_kmeans(m, 1, 300, 0), Error);
    CHECK_THROWS_AS(run_kmeans(m, 2, 0, 0), Error);
}

TEST_CASE("scaling every weight leaves k-means labels unchanged") {
    auto a = fixtures::uniform_matrix(50, 3, 21);
    auto b = a;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) *= 4.0;
    }
    const auto la = run_kmeans(EncodedMatrix::from_values(a), 3, 300, 5, 3).assignment.labels;
    const auto lb = run_kmeans(EncodedMatrix::from_values(b), 3, 300, 5, 3).assignment.labels;
    CHECK(oracle::same_partition(la, lb));
}
