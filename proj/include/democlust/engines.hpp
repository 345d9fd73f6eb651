#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "democlust/distances.hpp"
#include "democlust/eigen.hpp"
#include "democlust/encoding.hpp"

namespace democlust {

enum class Algorithm { kKMeans, kDbscan, kAgglomerative, kSpectral };
enum class Linkage { kWard, kAverage, kComplete };

const char* to_string(Algorithm a) noexcept;
const char* to_string(Linkage l) noexcept;
Algorithm algorithm_from_string(std::string_view s);
Linkage linkage_from_string(std::string_view s);

struct KMeansParams {
    int k = 2;
    int max_iter = 300;
    int n_init = 5;
    bool operator==(const KMeansParams&) const = default;
};

/// eps is either fixed, or resolved at run time as a percentile of the
/// 4-NN distance distribution when `eps_percentile` is set.
struct DbscanParams {
    std::optional<double> eps_percentile;
    double eps = 0.0;
    int min_pts = 4;
    bool operator==(const DbscanParams&) const = default;
};

struct AgglomerativeParams {
    int k = 2;
    Linkage linkage = Linkage::kWard;
    bool operator==(const AgglomerativeParams&) const = default;
};

struct SpectralParams {
    int k = 2;
    bool operator==(const SpectralParams&) const = default;
};

using Hyperparameters = std::variant<KMeansParams, DbscanParams, AgglomerativeParams, SpectralParams>;

/// One clustering model: an algorithm, its hyperparameters and a fixed seed.
struct ModelCandidate {
    Hyperparameters params;
    std::uint64_t seed = 0;

    Algorithm algorithm() const noexcept;
    /// Number of clusters requested, if the algorithm takes one.
    std::optional<int> k() const noexcept;
    /// Hyperparameters as a comparable tuple (used for deterministic ordering).
    std::vector<double> param_tuple() const;
    /// Short human-readable form, e.g. "kmeans(k=3)".
    std::string label() const;

    bool operator==(const ModelCandidate&) const = default;
};

inline constexpr int kNoise = -1;

/**
 * A partition of the matrix rows it was computed on.
 *
 * labels[r] is the cluster of item_ids[r]; cluster ids are 0..n_clusters-1 in
 * first-occurrence order, and DBSCAN outliers carry kNoise. Centroids are
 * per-cluster means in encoded space; inertia is the sum of squared distances
 * of non-noise rows to their centroid.
 */
struct ClusterAssignment {
    std::vector<ItemId> item_ids;
    std::vector<int> labels;
    int n_clusters = 0;
    Matrix centroids;
    double inertia = 0.0;

    std::size_t noise_count() const;
    std::vector<std::size_t> cluster_sizes() const;
    /// Members of each cluster as item ids.
    std::vector<std::vector<ItemId>> clusters() const;
};

/// Relabel in first-occurrence order and compute centroids and inertia.
ClusterAssignment make_assignment(const EncodedMatrix& matrix, std::vector<int> labels);

/// Labels relabelled in first-occurrence order (noise kept as kNoise), so two
/// partitions are equal as set-of-sets iff their canonical labels are equal.
std::vector<int> canonical_labels(std::span<const int> labels);

// ---------------------------------------------------------------- k-means

struct KMeansRun {
    ClusterAssignment assignment;
    /// Inertia after every Lloyd iteration of the returned restart.
    std::vector<double> inertia_history;
    int iterations = 0;
    int empty_cluster_repairs = 0;
};

/**
 * Lloyd's algorithm from k-means++ seeding. Runs `n_init` restarts with seeds
 * derived from `seed` and keeps the lowest inertia. A cluster that empties is
 * re-seeded with the point farthest from its own centroid. Points only change
 * cluster on a strictly smaller distance.
 *
 * Requires 2 <= k <= rows (Error kInfeasibleK) and max_iter >= 1.
 */
KMeansRun run_kmeans(const EncodedMatrix& matrix, int k, int max_iter, std::uint64_t seed,
                     int n_init = 1);

// ----------------------------------------------------------------- DBSCAN

/**
 * Density-based clustering. A row is core when at least min_pts rows
 * (itself included) lie within eps. Clusters are connected components of
 * core rows; each border row joins the cluster of its nearest core neighbour
 * (ties to the smaller item id), which makes the result independent of row
 * order. Everything else is kNoise.
 */
ClusterAssignment run_dbscan(const EncodedMatrix& matrix, double eps, int min_pts);
ClusterAssignment run_dbscan(const EncodedMatrix& matrix, const PairwiseDistances& distances,
                             double eps, int min_pts);

/// eps at the given percentile of the 4-NN distance distribution.
double dbscan_eps_from_percentile(const PairwiseDistances& distances, double pct);

// ---------------------------------------------------------- agglomerative

/// Full bottom-up merge sequence for one linkage; cut() yields any k.
class Dendrogram {
public:
    struct Merge {
        std::size_t a;  // representative rows of the merged clusters
        std::size_t b;
        double height;
    };

    static Dendrogram build(const EncodedMatrix& matrix, Linkage linkage);
    static Dendrogram build(const EncodedMatrix& matrix, const PairwiseDistances& distances,
                            Linkage linkage);

    Linkage linkage() const noexcept { return linkage_; }
    const std::vector<Merge>& merges() const noexcept { return merges_; }
    std::size_t leaves() const noexcept { return n_; }

    /// Row labels after n-k merges.
    std::vector<int> cut(int k) const;

private:
    Linkage linkage_ = Linkage::kWard;
    std::size_t n_ = 0;
    std::vector<Merge> merges_;
};

/// Merge until k clusters remain; equal-distance ties go to the pair with the
/// smallest (min item id, min item id).
ClusterAssignment run_agglomerative(const EncodedMatrix& matrix, int k, Linkage linkage);

// --------------------------------------------------------------- spectral

inline constexpr int kMaxSpectralK = 8;
/// Above this many rows the embedding uses Lanczos instead of Jacobi.
inline constexpr std::size_t kJacobiMaxRows = 500;

/// RBF width 1/d where d counts dimensions that are not identically zero.
double rbf_gamma(const EncodedMatrix& matrix);

/// I - D^-1/2 W D^-1/2 for the RBF affinity W (self-affinity 1).
Matrix normalized_laplacian(const EncodedMatrix& matrix);

/// Bottom eigenpairs of the normalized Laplacian.
struct SpectralEmbedding {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // rows x eigenvalues.size()
};

/// The min(kMaxSpectralK, rows) smallest eigenpairs.
SpectralEmbedding spectral_embedding(const EncodedMatrix& matrix);

/// k-means (seeded) on the row-normalized first k eigenvectors.
ClusterAssignment cluster_embedding(const EncodedMatrix& matrix, const SpectralEmbedding& embedding,
                                    int k, std::uint64_t seed);

/// Requires rows >= 3 and 2 <= k <= min(rows, 8).
ClusterAssignment run_spectral(const EncodedMatrix& matrix, int k, std::uint64_t seed);

// ---------------------------------------------------------------- generic

/// Run any candidate. DBSCAN percentile eps is resolved against the matrix.
ClusterAssignment run_candidate(const EncodedMatrix& matrix, const ModelCandidate& candidate);

// ------------------------------------------------------------ sub-cluster

/// A single clustering of one cluster's members.
struct SubClusterModel {
    std::int64_t parent_cluster = -1;
    std::vector<ItemId> members;
    ClusterAssignment assignment;
    ModelCandidate candidate;
    std::size_t rotation_index = 0;
    int refresh_count = 0;
};

/// Fixed cycle of (algorithm, hyperparameters) pairs tried by subcluster().
const std::vector<ModelCandidate>& subcluster_rotation();

/**
 * Cluster the members of a parent cluster with one model. The first call uses
 * rotation entry 0; passing the previous model advances to the next entry and
 * increments refresh_count. Requires at least 4 members (Error kTooSmall).
 */
SubClusterModel subcluster(const EncodedMatrix& matrix, std::int64_t parent_cluster,
                           std::span<const ItemId> parent_members,
                           const SubClusterModel* previous, std::uint64_t seed);

}  // namespace democlust
