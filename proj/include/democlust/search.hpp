#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "democlust/data_table.hpp"
#include "democlust/encoding.hpp"
#include "democlust/engines.hpp"
#include "democlust/features.hpp"
#include "democlust/layout.hpp"
#include "democlust/metrics.hpp"

namespace democlust {

inline constexpr std::size_t kDefaultTopF = 5;
inline constexpr double kMismatchThreshold = 0.99;
inline constexpr double kMaxNoiseFraction = 0.5;

struct DescriptionPayload {
    int n_clusters = 0;
    std::vector<std::string> top_features;  // at most 3
    std::vector<std::size_t> cluster_sizes;
    std::size_t unclustered = 0;
    std::string sentence;
};

struct ModelResult {
    ModelCandidate candidate;
    ClusterAssignment assignment;
    MetricBundle metrics;
    FeatureSpec feature_spec;
    DescriptionPayload description;
};

struct CandidateFailure {
    std::string candidate;
    std::string reason;
};

struct RecommendationSet {
    std::uint64_t generation = 0;
    std::optional<ModelResult> current_shown;
    std::vector<ModelResult> ranked;
    bool stale = false;
    /// Labels were given and the best model's homogeneity is below 0.99.
    bool mismatch = false;
    std::vector<CandidateFailure> failures;

    /// 0 is current_shown, 1..ranked.size() index ranked.
    const ModelResult& at_rank(std::size_t rank) const;
    std::size_t size() const noexcept { return (current_shown ? 1 : 0) + ranked.size(); }
};

struct SearchConstraints {
    std::optional<int> desired_k;
};

struct SearchOptions {
    std::size_t top_f = kDefaultTopF;
    std::uint64_t seed = 0;
    /// 0 uses the hardware concurrency
    unsigned threads = 0;
    SearchConstraints constraints;
};

/**
 * The default grid for a matrix with n_rows rows: kmeans k 2..10, DBSCAN at
 * the 10/25/50th 4-NN percentiles x min_pts {4, 8}, agglomerative
 * {ward, average, complete} x k 2..10, spectral k 2..8, with every k capped
 * at n_rows - 1. desired_k pins k for the k-parameterized algorithms.
 */
std::vector<ModelCandidate> enumerate_space(std::size_t n_rows, const SearchConstraints& constraints,
                                            std::uint64_t seed);

/// Total order used for ranking. True when a precedes b.
bool ranks_before(const ModelResult& a, const ModelResult& b);

/**
 * Per-column share of the matrix's encoded variance (PCA: explained variance
 * times squared loading), indexed by table column.
 */
std::vector<double> feature_contributions(const FeatureSpec& spec, const EncodedMatrix& matrix,
                                          std::size_t n_columns);

DescriptionPayload describe(const ClusterAssignment& assignment,
                            const std::vector<std::string>& top_features);

/// Up to three column names with the largest positive contribution.
std::vector<std::string> top_features(const FeatureSpec& spec, const EncodedMatrix& matrix,
                                      const DataTable& table);

/**
 * Run, score and rank every candidate. DBSCAN results with more than half
 * the rows as noise are discarded, as are results whose cluster count
 * differs from constraints.desired_k. Identical partitions keep only the
 * higher-ranked result. current_shown is the best result and ranked the
 * next top_f.
 *
 * Throws Error(kEmptySpace) when no candidate produced a result and
 * Error(kCancelled) when `stop` is requested.
 */
RecommendationSet search(const DataTable& table, const FeatureSpec& spec, const EncodedMatrix& matrix,
                         std::span<const ModelCandidate> candidates, const GroundTruthLabels* truth,
                         const SearchOptions& options, std::uint64_t generation,
                         std::stop_token stop = {});

/// Encode with `spec`, enumerate the grid and search without labels.
RecommendationSet search_table(const DataTable& table, const FeatureSpec& spec,
                               const SearchOptions& options, std::uint64_t generation,
                               std::stop_token stop = {});

/**
 * Search again with the layout's clusters as ground truth. Deleted items are
 * dropped from the matrix. A select_k_best spec is re-selected by ANOVA F
 * against the demonstrated classes.
 *
 * Throws Error(kNoLabels) when the layout has no assigned item.
 */
RecommendationSet rerank_on_demonstration(const DataTable& table, const WorkingLayout& layout,
                                          const FeatureSpec& spec, const SearchOptions& options,
                                          std::uint64_t generation, std::stop_token stop = {});

/// Groups of a result as the payload of a load_recommendation op; noise
/// items stay unassigned.
DemonstrationOp recommendation_op(const ModelResult& result);

/**
 * Latest published recommendations of one session. Each recompute takes a
 * new generation; a result is published only if no newer one has been.
 */
class RecommendationStore {
public:
    std::uint64_t next_generation();
    std::uint64_t requested() const;
    /// False (and nothing changes) if `recs` is older than what is published.
    bool publish(RecommendationSet recs);
    void publish_failure(std::uint64_t generation, std::string reason);
    /// Copy of the published set, if any.
    std::optional<RecommendationSet> latest() const;
    std::optional<std::pair<std::uint64_t, std::string>> failure() const;

private:
    mutable std::mutex mutex_;
    std::uint64_t requested_ = 0;
    std::optional<RecommendationSet> published_;
    std::optional<std::pair<std::uint64_t, std::string>> failure_;
};

}  // namespace democlust
