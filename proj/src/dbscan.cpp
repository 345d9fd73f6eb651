#include <limits>
#include <vector>

#include "democlust/engines.hpp"
#include "democlust/error.hpp"

namespace democlust {

double dbscan_eps_from_percentile(const PairwiseDistances& distances, double pct) {
    const double eps = percentile(kth_neighbor_distances(distances, 4), pct);
    // duplicated points give a zero percentile; eps must stay positive
    return std::max(eps, 1e-9);
}

ClusterAssignment run_dbscan(const EncodedMatrix& matrix, double eps, int min_pts) {
    return run_dbscan(matrix, PairwiseDistances(matrix), eps, min_pts);
}

ClusterAssignment run_dbscan(const EncodedMatrix& matrix, const PairwiseDistances& dist,
                             double eps, int min_pts) {
    if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "DBSCAN eps must be > 0");
    if (min_pts < 2) throw Error(ErrorCode::kInvalidArgument, "DBSCAN min_pts must be >= 2");
    const std::size_t n = matrix.rows();
    if (dist.size() != n) throw Error(ErrorCode::kInvalidArgument, "distance table size mismatch");

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        const auto row = dist.row(i);
        for (std::size_t j = 0; j < n; ++j) count += row[j] <= eps;
        core[i] = count >= static_cast<std::size_t>(min_pts);
    }

    // connected components of the core graph, ids in first-touch row order
    std::vector<int> labels(n, kNoise);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (!core[s] || labels[s] != kNoise) continue;
        labels[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const auto row = dist.row(p);
            for (std::size_t q = 0; q < n; ++q) {
                if (core[q] && labels[q] == kNoise && row[q] <= eps) {
                    labels[q] = next;
                    stack.push_back(q);
                }
            }
        }
        ++next;
    }

    // border points join their nearest core neighbour
    const auto& ids = matrix.item_ids();
    std::vector<int> final_labels = labels;
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        const auto row = dist.row(i);
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!core[j] || row[j] > eps) continue;
            if (row[j] < best_d || (row[j] == best_d && ids[j] < ids[best])) {
                best_d = row[j];
                best = j;
            }
        }
        if (best != n) final_labels[i] = labels[best];
    }
    return make_assignment(matrix, std::move(final_labels));
}

}  // namespace democlust
