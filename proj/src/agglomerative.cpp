#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "democlust/engines.hpp"
#include "democlust/error.hpp"

namespace democlust {

Dendrogram Dendrogram::build(const EncodedMatrix& matrix, Linkage linkage) {
    return build(matrix, PairwiseDistances(matrix), linkage);
}

Dendrogram Dendrogram::build(const EncodedMatrix& matrix, const PairwiseDistances& dist,
                             Linkage linkage) {
    const std::size_t n = matrix.rows();
    if (dist.size() != n) throw Error(ErrorCode::kInvalidArgument, "distance table size mismatch");
    Dendrogram out;
    out.linkage_ = linkage;
    out.n_ = n;
    if (n < 2) return out;

    // Ward works on squared distances so the Lance-Williams update is exact.
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = dist.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            d[i * n + j] = linkage == Linkage::kWard ? row[j] * row[j] : row[j];
        }
    }
    auto D = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };

    std::vector<char> active(n, 1);
    std::vector<double> size(n, 1.0);
    std::vector<ItemId> key(matrix.item_ids());
    std::vector<std::size_t> nn(n, n);
    std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

    auto recompute = [&](std::size_t i) {
        std::size_t best = n;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !active[j]) continue;
            const double v = D(i, j);
            if (v < bd || (v == bd && key[j] < key[best])) {
                bd = v;
                best = j;
            }
        }
        nn[i] = best;
        nnd[i] = bd;
    };
    for (std::size_t i = 0; i < n; ++i) recompute(i);

    std::vector<std::size_t> stale;
    out.merges_.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i] || nn[i] == n) continue;
            if (pick == n) {
                pick = i;
                continue;
            }
            if (nnd[i] < nnd[pick]) {
                pick = i;
            } else if (nnd[i] == nnd[pick]) {
                const auto lo_i = std::min(key[i], key[nn[i]]), hi_i = std::max(key[i], key[nn[i]]);
                const auto lo_p = std::min(key[pick], key[nn[pick]]),
                           hi_p = std::max(key[pick], key[nn[pick]]);
                if (lo_i < lo_p || (lo_i == lo_p && hi_i < hi_p)) pick = i;
            }
        }
        std::size_t a = pick;
        std::size_t b = nn[pick];
        if (key[b] < key[a]) std::swap(a, b);
        const double dab = D(a, b);
        out.merges_.push_back({a, b, linkage == Linkage::kWard ? std::sqrt(dab) : dab});

        const double na = size[a], nb = size[b];
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a || k == b) continue;
            const double dak = D(a, k), dbk = D(b, k);
            double v = 0.0;
            switch (linkage) {
            case Linkage::kWard: {
                const double nk = size[k];
                v = ((na + nk) * dak + (nb + nk) * dbk - nk * dab) / (na + nb + nk);
                break;
            }
            case Linkage::kAverage: v = (na * dak + nb * dbk) / (na + nb); break;
            case Linkage::kComplete: v = std::max(dak, dbk); break;
            }
            D(a, k) = v;
            D(k, a) = v;
        }
        active[b] = 0;
        size[a] = na + nb;
        key[a] = std::min(key[a], key[b]);

        stale.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a) continue;
            if (nn[k] == a || nn[k] == b) {
                stale.push_back(k);
            } else {
                const double v = D(k, a);
                if (v < nnd[k] || (v == nnd[k] && key[a] < key[nn[k]])) {
                    nn[k] = a;
                    nnd[k] = v;
                }
            }
        }
        recompute(a);
        for (auto k : stale) recompute(k);
    }
    return out;
}

std::vector<int> Dendrogram::cut(int k) const {
    if (k < 1 || static_cast<std::size_t>(k) > n_) {
        throw Error(ErrorCode::kInfeasibleK, "cannot cut " + std::to_string(n_) + " leaves into " +
                                                 std::to_string(k) + " clusters");
    }
    std::vector<std::size_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    const std::size_t steps = n_ - static_cast<std::size_t>(k);
    for (std::size_t s = 0; s < steps; ++s) {
        const auto ra = find(merges_[s].a), rb = find(merges_[s].b);
        parent[rb] = ra;
    }
    std::vector<int> labels(n_);
    for (std::size_t i = 0; i < n_; ++i) labels[i] = static_cast<int>(find(i));
    return canonical_labels(labels);
}

ClusterAssignment run_agglomerative(const EncodedMatrix& matrix, int k, Linkage linkage) {
    if (k < 2 || static_cast<std::size_t>(k) > matrix.rows()) {
        throw Error(ErrorCode::kInfeasibleK, "agglomerative needs 2 <= k <= " +
                                                 std::to_string(matrix.rows()) + ", got " +
                                                 std::to_string(k));
    }
    const auto tree = Dendrogram::build(matrix, linkage);
    return make_assignment(matrix, tree.cut(k));
}

}  // namespace democlust
