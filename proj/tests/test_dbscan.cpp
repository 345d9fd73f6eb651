#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

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

TEST_CASE("DBSCAN separates a dense run from an outlier") {
    const auto a = run_dbscan(column({0, 0.5, 1, 10}), 1.0, 2);
    CHECK(a.labels == std::vector<int>{0, 0, 0, kNoise});
    CHECK(a.n_clusters == 1);
    CHECK(a.noise_count() == 1);
}

TEST_CASE("DBSCAN with a huge eps or identical points gives one cluster") {
    CHECK(run_dbscan(column({0, 3, 7, 100}), 1000.0, 2).n_clusters == 1);
    const auto same = run_dbscan(column({2, 2, 2}), 0.1, 2);
    CHECK(same.n_clusters == 1);
    CHECK(same.noise_count() == 0);
}

TEST_CASE("DBSCAN rejects invalid parameters") {
    CHECK_THROWS_AS(run_dbscan(column({0, 1}), 0.0, 2), Error);
    CHECK_THROWS_AS(run_dbscan(column({0, 1}), 1.0, 1), Error);
}

TEST_CASE("DBSCAN is independent of row order") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto base = fixtures::gaussian_blobs(60, 2, 2, 0.8, 4.0, seed);
        std::vector<std::size_t> perm(60);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
        Matrix shuffled(60, 2);
        for (std::size_t i = 0; i < 60; ++i) {
            for (std::size_t j = 0; j < 2; ++j) shuffled(i, j) = base.points(perm[i], j);
        }
        const auto a = run_dbscan(EncodedMatrix::from_values(base.points), 0.6, 4);
        const auto b = run_dbscan(EncodedMatrix::from_values(shuffled), 0.6, 4);
        std::vector<int> unshuffled(60);
        for (std::size_t i = 0; i < 60; ++i) unshuffled[perm[i]] = b.labels[i];
        CHECK(oracle::same_partition(a.labels, unshuffled));
    }
}

TEST_CASE("percentile eps follows the 4-NN distances") {
    const auto m = column({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const PairwiseDistances d(m);
    const auto knn = kth_neighbor_distances(d, 4);
    CHECK(knn[0] == 4.0);
    CHECK(knn[5] == 2.0);
    CHECK(dbscan_eps_from_percentile(d, 50) == doctest::Approx(percentile(knn, 50)));
    CHECK(percentile({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
    CHECK(percentile({1, 2, 3, 4}, 0) == 1.0);
    CHECK(percentile({1, 2, 3, 4}, 100) == 4.0);
}
