#pragma once

#include <optional>
#include <string>
#include <vector>

#include "democlust/data_table.hpp"
#include "democlust/encoding.hpp"
#include "democlust/matrix.hpp"
#include "democlust/metrics.hpp"

namespace democlust {

enum class FeatureMode { kUser, kSelectKBest, kPca };

const char* to_string(FeatureMode mode) noexcept;
FeatureMode feature_mode_from_string(std::string_view s);

/// The feature set F (and weights) that drives every model in a search.
struct FeatureSpec {
    FeatureMode mode = FeatureMode::kUser;
    /// user and select_k_best: chosen columns with weights
    std::vector<WeightedFeature> selected;
    int k_best = 0;
    int pca_components = 0;

    // pca only
    std::vector<double> pca_centre;              // per fully-encoded dimension
    std::optional<Matrix> pca_axes;              // components x fully-encoded dims
    std::optional<Matrix> derived_loadings;      // components x table columns
    std::vector<std::string> loading_columns;    // names for derived_loadings columns
    std::vector<double> explained_variance;      // per component, non-increasing
    std::vector<double> explained_variance_ratio;

    /// Throws on an invariant violation (unknown column, no positive weight,
    /// k_best or pca_components out of range).
    void validate(const DataTable& table) const;
};

/// User-specified features and weights.
FeatureSpec user_features(std::vector<WeightedFeature> selected);

/**
 * Keep the k columns whose encoded dimensions vary most (max over a
 * categorical group's dimensions). Ties go to the lower column index.
 */
FeatureSpec select_k_best(const DataTable& table, int k);

/**
 * Supervised variant used once demonstrations exist: rank columns by the
 * one-way ANOVA F statistic against the labelled items (max over a
 * categorical group). Falls back to variance ranking when fewer than two
 * classes or no within-class degrees of freedom exist.
 */
FeatureSpec select_k_best(const DataTable& table, int k, const GroundTruthLabels& truth);

/// select_k_best with k = min(8, column count).
FeatureSpec default_features(const DataTable& table);

/**
 * Principal axes of the fully encoded table from the symmetric eigensolver
 * on its covariance. Clustering then runs on the projected coordinates.
 */
FeatureSpec pca_features(const DataTable& table, int n_components);

/// The matrix a FeatureSpec describes: the weighted encoding, or its PCA
/// projection.
EncodedMatrix apply_weights(const FeatureSpec& spec, const DataTable& table);

}  // namespace democlust
