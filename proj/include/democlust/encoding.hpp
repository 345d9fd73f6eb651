#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "democlust/data_table.hpp"
#include "democlust/matrix.hpp"

namespace democlust {

/// A selected source column and its user weight (w >= 0).
struct WeightedFeature {
    std::string column;
    double weight = 1.0;

    bool operator==(const WeightedFeature&) const = default;
};

/**
 * What one encoded dimension means.
 *
 * encoded = (raw - offset) * scale, where raw is the numeric value or the 0/1
 * category indicator. `component` is set for dimensions produced by a PCA
 * projection, in which case `column` names the top-loading source column.
 */
struct EncodedDimension {
    std::size_t column = 0;
    std::string column_name;
    std::optional<std::string> category;
    std::optional<std::size_t> component;
    double offset = 0.0;
    double scale = 1.0;
};

/// Numeric matrix every clustering algorithm consumes. Row r describes item
/// item_ids()[r]. Immutable after construction.
class EncodedMatrix {
public:
    EncodedMatrix() = default;
    EncodedMatrix(Matrix values, std::vector<EncodedDimension> dims, std::vector<ItemId> item_ids);

    /// Wrap raw values; items are 0..rows-1 and dimensions are unnamed.
    static EncodedMatrix from_values(Matrix values);

    const Matrix& values() const noexcept { return values_; }
    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t dims() const noexcept { return values_.cols(); }
    std::span<const double> row(std::size_t r) const { return values_.row(r); }
    const std::vector<EncodedDimension>& feature_map() const noexcept { return dims_; }
    const std::vector<ItemId>& item_ids() const noexcept { return item_ids_; }

    /// Row holding `item`; throws Error(kUnknownItem).
    std::size_t row_of(ItemId item) const;
    /// Sub-matrix restricted to the given items, in the given order.
    EncodedMatrix select_items(std::span<const ItemId> items) const;

    /// Source column of every dimension.
    std::vector<std::size_t> decode_columns() const;

private:
    Matrix values_;
    std::vector<EncodedDimension> dims_;
    std::vector<ItemId> item_ids_;
};

/**
 * Encode the selected columns of `table`.
 *
 * Numeric columns are z-normalized (population stddev; a constant column maps
 * to zeros) and missing values are imputed with the mean, i.e. 0. A
 * categorical column with c categories becomes c one-hot dimensions scaled by
 * 1/sqrt(c); a missing cell is all-zero in its group. Each dimension is then
 * multiplied by its column's weight.
 *
 * Throws Error(kUnknownFeature) for unknown names and Error(kEmptyFeatures)
 * when nothing is selected or every weight is zero.
 */
EncodedMatrix encode(const DataTable& table, std::span<const WeightedFeature> features);

/// All columns with weight 1.
std::vector<WeightedFeature> all_features(const DataTable& table);

}  // namespace democlust
