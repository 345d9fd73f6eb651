#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "democlust/data_table.hpp"

namespace democlust {

enum class SelectionProvenance { kCellClick, kRowClick, kLasso, kClusterPick };

const char* to_string(SelectionProvenance p) noexcept;
SelectionProvenance selection_provenance_from_string(std::string_view s);

/// A non-empty, sorted, duplicate-free set of items.
struct SelectionSet {
    std::vector<ItemId> item_ids;
    SelectionProvenance provenance = SelectionProvenance::kRowClick;

    /// Sorts, dedups and validates ids against n_rows. Throws on empty input.
    static SelectionSet make(std::vector<ItemId> ids, SelectionProvenance provenance,
                             std::size_t n_rows);

    bool contains(ItemId id) const;
    std::size_t size() const noexcept { return item_ids.size(); }
};

/// Threshold configuration for similar-item selection.
struct SimilarityConfig {
    /// eps = eps_fraction * (max - min) of the clicked numeric column
    double eps_fraction = 0.05;
    /// Absolute eps per column name; takes precedence over the fraction.
    std::map<std::string, double> eps_override;

    double eps_for(const ColumnSpec& column) const;
};

/**
 * Items similar to the clicked cell (item, column).
 *
 * Numeric columns match |v - v_clicked| <= eps on raw values; categorical
 * columns match exactly. With an active selection the result is the
 * intersection with it, so chained clicks only ever narrow the set.
 *
 * Throws Error(kEmptyCell) when the clicked cell is missing and
 * Error(kEmptySelection) when the intersection is empty.
 */
SelectionSet similar_by_cell(const DataTable& table, ItemId item, std::string_view column,
                             const std::optional<SelectionSet>& active_selection = std::nullopt,
                             const SimilarityConfig& config = {});

}  // namespace democlust
