#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "democlust/distances.hpp"
#include "democlust/encoding.hpp"
#include "democlust/engines.hpp"

namespace democlust {

/// Partial class labelling of items, derived from user demonstrations.
struct GroundTruthLabels {
    std::map<ItemId, int> labels;

    /// Number of distinct classes.
    int m() const;
    bool empty() const noexcept { return labels.empty(); }
};

// ------------------------------------------------------ internal validity

/**
 * Mean silhouette over non-noise rows. Rows in singleton clusters score 0.
 * Throws Error(kUndefinedMetric) with fewer than two non-noise clusters.
 */
double silhouette(const EncodedMatrix& matrix, const ClusterAssignment& assignment);
double silhouette(const PairwiseDistances& distances, std::span<const int> labels);

/// Davies-Bouldin index (lower is better). Coincident centroids give +inf.
double davies_bouldin(const EncodedMatrix& matrix, const ClusterAssignment& assignment);

// ------------------------------------------------------------- agreement
//
// Label-vector forms take two equally long vectors of arbitrary integer
// labels; kNoise is just another label. Entropies use natural logs.

double homogeneity(std::span<const int> pred, std::span<const int> truth);
double adjusted_rand(std::span<const int> pred, std::span<const int> truth);
double fowlkes_mallows(std::span<const int> pred, std::span<const int> truth);
double nmi(std::span<const int> pred, std::span<const int> truth);

/// Aligned (pred, truth) pairs over items present in both.
struct LabelPairs {
    std::vector<int> pred;
    std::vector<int> truth;
};

/// Restrict to the labelled subset. Throws Error(kUndefinedMetric) when no
/// predicted item is labelled.
LabelPairs labelled_pairs(const ClusterAssignment& pred, const GroundTruthLabels& truth);

double homogeneity(const ClusterAssignment& pred, const GroundTruthLabels& truth);
double adjusted_rand(const ClusterAssignment& pred, const GroundTruthLabels& truth);
double fowlkes_mallows(const ClusterAssignment& pred, const GroundTruthLabels& truth);
double nmi(const ClusterAssignment& pred, const GroundTruthLabels& truth);

// ----------------------------------------------------------------- score

struct MetricBundle {
    std::optional<double> silhouette;       // nullopt when undefined
    std::optional<double> davies_bouldin;   // nullopt when undefined
    std::optional<double> homogeneity;
    std::optional<double> ari;
    std::optional<double> fowlkes_mallows;
    std::optional<double> nmi;
    double score = 0.0;
};

/// Ranking key in [0, 1]: homogeneity when labels exist, otherwise
/// (silhouette + 1) / 2, and 0 when silhouette is undefined. Without labels
/// noise rows count as silhouette 0, so the silhouette is scaled by the
/// clustered fraction 1 - noise_fraction.
double composite_score(std::optional<double> silhouette, std::optional<double> homogeneity,
                       double noise_fraction = 0.0);

/// All metrics for one assignment. Label-based fields are filled iff truth
/// is given.
MetricBundle evaluate(const EncodedMatrix& matrix, const PairwiseDistances& distances,
                      const ClusterAssignment& assignment, const GroundTruthLabels* truth);

}  // namespace democlust
