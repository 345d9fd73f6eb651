#include <algorithm>
#include <limits>
#include <random>

#include "democlust/engines.hpp"
#include "democlust/error.hpp"
#include "rng.hpp"

namespace democlust {

namespace {

struct LloydResult {
    std::vector<int> labels;
    std::vector<double> history;
    double inertia = 0.0;
    int iterations = 0;
    int repairs = 0;
};

Matrix kmeanspp_init(const EncodedMatrix& m, int k, std::mt19937_64& rng) {
    const std::size_t n = m.rows();
    const std::size_t d = m.dims();
    Matrix centers(static_cast<std::size_t>(k), d);
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t c, std::size_t row) {
        chosen[row] = true;
        auto src = m.row(row);
        std::copy(src.begin(), src.end(), centers.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(m.row(i), src));
        }
    };

    take(0, static_cast<std::size_t>(rng() % n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = detail::unit_double(rng()) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                acc += d2[i];
                pick = i;
                if (acc > target) break;
            }
        } else {
            // every point coincides with a center; take the first unused row
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        take(static_cast<std::size_t>(c), pick);
    }
    return centers;
}

LloydResult lloyd(const EncodedMatrix& m, int k, int max_iter, std::uint64_t seed) {
    const std::size_t n = m.rows();
    const std::size_t d = m.dims();
    const auto uk = static_cast<std::size_t>(k);
    std::mt19937_64 rng(seed);
    Matrix centers = kmeanspp_init(m, k, rng);

    LloydResult res;
    res.labels.assign(n, -1);
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> counts(uk, 0);

    for (int iter = 1; iter <= max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = m.row(i);
            int best = res.labels[i];
            double best_d = best >= 0 ? squared_distance(x, centers.row(static_cast<std::size_t>(best)))
                                      : std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < uk; ++c) {
                if (static_cast<int>(c) == best) continue;
                const double dc = squared_distance(x, centers.row(c));
                if (dc < best_d) {
                    best_d = dc;
                    best = static_cast<int>(c);
                }
            }
            if (best != res.labels[i]) changed = true;
            res.labels[i] = best;
            dist[i] = best_d;
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (int l : res.labels) ++counts[static_cast<std::size_t>(l)];
        for (std::size_t c = 0; c < uk; ++c) {
            if (counts[c] != 0) continue;
            // re-seed with the point farthest from its own centroid
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(res.labels[i])] < 2) continue;
                if (dist[i] > far_d) {
                    far_d = dist[i];
                    far = i;
                }
            }
            if (far == n) break;
            --counts[static_cast<std::size_t>(res.labels[far])];
            res.labels[far] = static_cast<int>(c);
            counts[c] = 1;
            dist[far] = 0.0;
            ++res.repairs;
            changed = true;
        }

        Matrix sums(uk, d);
        for (std::size_t i = 0; i < n; ++i) {
            auto s = sums.row(static_cast<std::size_t>(res.labels[i]));
            auto x = m.row(i);
            for (std::size_t j = 0; j < d; ++j) s[j] += x[j];
        }
        for (std::size_t c = 0; c < uk; ++c) {
            auto s = sums.row(c);
            auto ctr = centers.row(c);
            for (std::size_t j = 0; j < d; ++j) ctr[j] = s[j] / static_cast<double>(counts[c]);
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(m.row(i), centers.row(static_cast<std::size_t>(res.labels[i])));
        }
        res.history.push_back(inertia);
        res.inertia = inertia;
        res.iterations = iter;
        if (!changed) break;
    }
    return res;
}

}  // namespace

KMeansRun run_kmeans(const EncodedMatrix& matrix, int k, int max_iter, std::uint64_t seed,
                     int n_init) {
    if (k < 2 || static_cast<std::size_t>(k) > matrix.rows()) {
        throw Error(ErrorCode::kInfeasibleK, "k-means needs 2 <= k <= " +
                                                 std::to_string(matrix.rows()) + ", got " +
                                                 std::to_string(k));
    }
    if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
    if (n_init < 1) throw Error(ErrorCode::kInvalidArgument, "n_init must be >= 1");

    LloydResult best;
    bool have = false;
    for (int r = 0; r < n_init; ++r) {
        auto run = lloyd(matrix, k, max_iter, detail::splitmix64(seed + static_cast<std::uint64_t>(r)));
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }

    KMeansRun out;
    out.assignment = make_assignment(matrix, std::move(best.labels));
    out.inertia_history = std::move(best.history);
    out.iterations = best.iterations;
    out.empty_cluster_repairs = best.repairs;
    return out;
}

}  // namespace democlust
