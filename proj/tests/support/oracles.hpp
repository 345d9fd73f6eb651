#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library: agreement metrics come from explicit pair
// enumeration and from entropies of count maps.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

struct PairCounts {
    double same_both = 0;   // same cluster, same class
    double same_pred = 0;   // same cluster, different class
    double same_truth = 0;  // different cluster, same class
    double neither = 0;
};

inline PairCounts count_pairs(std::span<const int> pred, std::span<const int> truth) {
    PairCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = i + 1; j < pred.size(); ++j) {
            const bool p = pred[i] == pred[j];
            const bool t = truth[i] == truth[j];
            if (p && t) c.same_both += 1;
            else if (p) c.same_pred += 1;
            else if (t) c.same_truth += 1;
            else c.neither += 1;
        }
    }
    return c;
}

inline double adjusted_rand(std::span<const int> pred, std::span<const int> truth) {
    const auto c = count_pairs(pred, truth);
    const double a = c.same_both, b = c.same_pred, cc = c.same_truth, d = c.neither;
    const double den = (a + b) * (b + d) + (a + cc) * (cc + d);
    if (den == 0.0) return 1.0;
    return 2.0 * (a * d - b * cc) / den;
}

inline double fowlkes_mallows(std::span<const int> pred, std::span<const int> truth) {
    const auto c = count_pairs(pred, truth);
    const double p = c.same_both + c.same_pred;
    const double t = c.same_both + c.same_truth;
    if (p == 0.0 || t == 0.0) return 0.0;
    return c.same_both / std::sqrt(p * t);
}

template <class Key>
double entropy_of(const std::map<Key, double>& counts, double n) {
    double h = 0.0;
    for (const auto& [k, v] : counts) {
        if (v > 0) h -= (v / n) * std::log(v / n);
    }
    return h;
}

struct Entropies {
    double h_truth = 0;
    double h_pred = 0;
    double h_joint = 0;
};

inline Entropies entropies(std::span<const int> pred, std::span<const int> truth) {
    std::map<int, double> cp, ct;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        cp[pred[i]] += 1;
        ct[truth[i]] += 1;
        joint[{pred[i], truth[i]}] += 1;
    }
    const double n = static_cast<double>(pred.size());
    return {entropy_of(ct, n), entropy_of(cp, n), entropy_of(joint, n)};
}

inline double homogeneity(std::span<const int> pred, std::span<const int> truth) {
    const auto e = entropies(pred, truth);
    if (e.h_truth == 0.0) return 1.0;
    const double conditional = e.h_joint - e.h_pred;  // H(C|K)
    return 1.0 - conditional / e.h_truth;
}

inline double nmi(std::span<const int> pred, std::span<const int> truth) {
    const auto e = entropies(pred, truth);
    const bool zt = e.h_truth == 0.0, zp = e.h_pred == 0.0;
    if (zt && zp) return 1.0;
    if (zt || zp) return 0.0;
    const double mi = e.h_truth + e.h_pred - e.h_joint;
    return mi / std::sqrt(e.h_truth * e.h_pred);
}

/// Minimum k-means objective over every assignment of the points to k
/// non-empty groups (k^n enumeration), with the labels attaining it.
inline std::pair<double, std::vector<int>> exhaustive_kmeans(const std::vector<std::vector<double>>& x,
                                                             int k) {
    const std::size_t n = x.size();
    const std::size_t d = x.empty() ? 0 : x[0].size();
    std::vector<int> labels(n, 0), best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (;;) {
        std::vector<int> used(static_cast<std::size_t>(k), 0);
        for (int l : labels) used[static_cast<std::size_t>(l)] = 1;
        bool all = true;
        for (int u : used) all = all && u;
        if (all) {
            double cost = 0.0;
            for (int c = 0; c < k; ++c) {
                std::vector<double> mean(d, 0.0);
                double cnt = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] != c) continue;
                    for (std::size_t j = 0; j < d; ++j) mean[j] += x[i][j];
                    cnt += 1;
                }
                for (auto& m : mean) m /= cnt;
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] != c) continue;
                    for (std::size_t j = 0; j < d; ++j) cost += (x[i][j] - mean[j]) * (x[i][j] - mean[j]);
                }
            }
            if (cost < best_cost) {
                best_cost = cost;
                best = labels;
            }
        }
        std::size_t pos = 0;
        while (pos < n && labels[pos] == k - 1) labels[pos++] = 0;
        if (pos == n) break;
        ++labels[pos];
    }
    return {best_cost, best};
}

/// True when two label vectors describe the same partition.
inline bool same_partition(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [x, ix] = ab.emplace(a[i], b[i]);
        auto [y, iy] = ba.emplace(b[i], a[i]);
        if (x->second != b[i] || y->second != a[i]) return false;
    }
    return true;
}

}  // namespace oracle
