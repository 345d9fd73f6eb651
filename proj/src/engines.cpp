#include "democlust/engines.hpp"

#include <cstdio>
#include <unordered_map>

#include "democlust/error.hpp"

namespace democlust {

const char* to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::kKMeans: return "kmeans";
    case Algorithm::kDbscan: return "dbscan";
    case Algorithm::kAgglomerative: return "agglomerative";
    case Algorithm::kSpectral: return "spectral";
    }
    return "kmeans";
}

const char* to_string(Linkage l) noexcept {
    switch (l) {
    case Linkage::kWard: return "ward";
    case Linkage::kAverage: return "average";
    case Linkage::kComplete: return "complete";
    }
    return "ward";
}

Algorithm algorithm_from_string(std::string_view s) {
    if (s == "kmeans") return Algorithm::kKMeans;
    if (s == "dbscan") return Algorithm::kDbscan;
    if (s == "agglomerative") return Algorithm::kAgglomerative;
    if (s == "spectral") return Algorithm::kSpectral;
    throw Error(ErrorCode::kInvalidArgument, "unknown algorithm '" + std::string(s) + "'");
}

Linkage linkage_from_string(std::string_view s) {
    if (s == "ward") return Linkage::kWard;
    if (s == "average") return Linkage::kAverage;
    if (s == "complete") return Linkage::kComplete;
    throw Error(ErrorCode::kInvalidArgument, "unknown linkage '" + std::string(s) + "'");
}

Algorithm ModelCandidate::algorithm() const noexcept {
    return static_cast<Algorithm>(params.index());
}

std::optional<int> ModelCandidate::k() const noexcept {
    if (auto p = std::get_if<KMeansParams>(&params)) return p->k;
    if (auto p = std::get_if<AgglomerativeParams>(&params)) return p->k;
    if (auto p = std::get_if<SpectralParams>(&params)) return p->k;
    return std::nullopt;
}

std::vector<double> ModelCandidate::param_tuple() const {
    return std::visit(
        [](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KMeansParams>) {
                return {double(p.k), double(p.max_iter), double(p.n_init)};
            } else if constexpr (std::is_same_v<T, DbscanParams>) {
                return {p.eps_percentile.value_or(-1.0), p.eps, double(p.min_pts)};
            } else if constexpr (std::is_same_v<T, AgglomerativeParams>) {
                return {double(p.k), double(static_cast<int>(p.linkage))};
            } else {
                return {double(p.k)};
            }
        },
        params);
}

std::string ModelCandidate::label() const {
    char buf[128];
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KMeansParams>) {
                std::snprintf(buf, sizeof buf, "kmeans(k=%d)", p.k);
            } else if constexpr (std::is_same_v<T, DbscanParams>) {
                if (p.eps_percentile) {
                    std::snprintf(buf, sizeof buf, "dbscan(eps=p%g,min_pts=%d)", *p.eps_percentile,
                                  p.min_pts);
                } else {
                    std::snprintf(buf, sizeof buf, "dbscan(eps=%g,min_pts=%d)", p.eps, p.min_pts);
                }
            } else if constexpr (std::is_same_v<T, AgglomerativeParams>) {
                std::snprintf(buf, sizeof buf, "agglomerative(linkage=%s,k=%d)",
                              to_string(p.linkage), p.k);
            } else {
                std::snprintf(buf, sizeof buf, "spectral(k=%d)", p.k);
            }
        },
        params);
    return buf;
}

std::size_t ClusterAssignment::noise_count() const {
    std::size_t n = 0;
    for (int l : labels) n += l == kNoise;
    return n;
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(n_clusters), 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    return sizes;
}

std::vector<std::vector<ItemId>> ClusterAssignment::clusters() const {
    std::vector<std::vector<ItemId>> out(static_cast<std::size_t>(n_clusters));
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] >= 0) out[static_cast<std::size_t>(labels[r])].push_back(item_ids[r]);
    }
    return out;
}

std::vector<int> canonical_labels(std::span<const int> labels) {
    std::unordered_map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] == kNoise) {
            out[r] = kNoise;
            continue;
        }
        auto [it, inserted] = remap.emplace(labels[r], static_cast<int>(remap.size()));
        out[r] = it->second;
    }
    return out;
}

ClusterAssignment make_assignment(const EncodedMatrix& matrix, std::vector<int> labels) {
    if (labels.size() != matrix.rows()) {
        throw Error(ErrorCode::kInvalidArgument, "label count does not match matrix rows");
    }
    ClusterAssignment out;
    out.item_ids = matrix.item_ids();
    out.labels = canonical_labels(labels);
    int k = 0;
    for (int l : out.labels) k = std::max(k, l + 1);
    out.n_clusters = k;

    const std::size_t d = matrix.dims();
    out.centroids = Matrix(static_cast<std::size_t>(k), d);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const int l = out.labels[r];
        if (l < 0) continue;
        auto c = out.centroids.row(static_cast<std::size_t>(l));
        auto x = matrix.row(r);
        for (std::size_t j = 0; j < d; ++j) c[j] += x[j];
        ++counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (auto& v : out.centroids.row(c)) v /= static_cast<double>(counts[c]);
    }
    double inertia = 0.0;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const int l = out.labels[r];
        if (l >= 0) inertia += squared_distance(matrix.row(r), out.centroids.row(static_cast<std::size_t>(l)));
    }
    out.inertia = inertia;
    return out;
}

ClusterAssignment run_candidate(const EncodedMatrix& matrix, const ModelCandidate& candidate) {
    return std::visit(
        [&](const auto& p) -> ClusterAssignment {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KMeansParams>) {
                return run_kmeans(matrix, p.k, p.max_iter, candidate.seed, p.n_init).assignment;
            } else if constexpr (std::is_same_v<T, DbscanParams>) {
                const PairwiseDistances dist(matrix);
                const double eps = p.eps_percentile
                                       ? dbscan_eps_from_percentile(dist, *p.eps_percentile)
                                       : p.eps;
                return run_dbscan(matrix, dist, eps, p.min_pts);
            } else if constexpr (std::is_same_v<T, AgglomerativeParams>) {
                return run_agglomerative(matrix, p.k, p.linkage);
            } else {
                return run_spectral(matrix, p.k, candidate.seed);
            }
        },
        candidate.params);
}

const std::vector<ModelCandidate>& subcluster_rotation() {
    static const std::vector<ModelCandidate> rotation = {
        {KMeansParams{2, 300, 5}, 0},
        {KMeansParams{3, 300, 5}, 0},
        {AgglomerativeParams{2, Linkage::kWard}, 0},
        {KMeansParams{4, 300, 5}, 0},
        {AgglomerativeParams{3, Linkage::kAverage}, 0},
        {DbscanParams{50.0, 0.0, 4}, 0},
    };
    return rotation;
}

SubClusterModel subcluster(const EncodedMatrix& matrix, std::int64_t parent_cluster,
                           std::span<const ItemId> parent_members,
                           const SubClusterModel* previous, std::uint64_t seed) {
    if (parent_members.size() < 4) {
        throw Error(ErrorCode::kTooSmall, "sub-clustering needs at least 4 members, got " +
                                              std::to_string(parent_members.size()));
    }
    const auto& rotation = subcluster_rotation();
    SubClusterModel model;
    model.parent_cluster = parent_cluster;
    model.members.assign(parent_members.begin(), parent_members.end());
    model.rotation_index = previous ? (previous->rotation_index + 1) % rotation.size() : 0;
    model.refresh_count = previous ? previous->refresh_count + 1 : 0;
    model.candidate = rotation[model.rotation_index];
    model.candidate.seed = seed;

    const EncodedMatrix sub = matrix.select_items(model.members);
    model.assignment = run_candidate(sub, model.candidate);
    return model;
}

}  // namespace democlust
