#include "democlust/selection.hpp"

#include <algorithm>
#include <cmath>

#include "democlust/error.hpp"

namespace democlust {

const char* to_string(SelectionProvenance p) noexcept {
    switch (p) {
    case SelectionProvenance::kCellClick: return "cell_click";
    case SelectionProvenance::kRowClick: return "row_click";
    case SelectionProvenance::kLasso: return "lasso";
    case SelectionProvenance::kClusterPick: return "cluster_pick";
    }
    return "row_click";
}

SelectionProvenance selection_provenance_from_string(std::string_view s) {
    if (s == "cell_click") return SelectionProvenance::kCellClick;
    if (s == "row_click") return SelectionProvenance::kRowClick;
    if (s == "lasso") return SelectionProvenance::kLasso;
    if (s == "cluster_pick") return SelectionProvenance::kClusterPick;
    throw Error(ErrorCode::kInvalidArgument, "unknown selection provenance '" + std::string(s) + "'");
}

SelectionSet SelectionSet::make(std::vector<ItemId> ids, SelectionProvenance provenance,
                                std::size_t n_rows) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw Error(ErrorCode::kEmptySelection, "selection is empty");
    if (ids.back() >= n_rows) {
        throw Error(ErrorCode::kUnknownItem, "item " + std::to_string(ids.back()) + " out of range");
    }
    return SelectionSet{std::move(ids), provenance};
}

bool SelectionSet::contains(ItemId id) const {
    return std::binary_search(item_ids.begin(), item_ids.end(), id);
}

double SimilarityConfig::eps_for(const ColumnSpec& column) const {
    if (auto it = eps_override.find(column.name); it != eps_override.end()) return it->second;
    return eps_fraction * column.range();
}

SelectionSet similar_by_cell(const DataTable& table, ItemId item, std::string_view column,
                             const std::optional<SelectionSet>& active_selection,
                             const SimilarityConfig& config) {
    const std::size_t col = table.column_index(column);
    if (item >= table.n_rows()) {
        throw Error(ErrorCode::kUnknownItem, "item " + std::to_string(item) + " out of range");
    }
    if (table.is_missing(item, col)) {
        throw Error(ErrorCode::kEmptyCell, "clicked cell is missing");
    }

    const auto& spec = table.column(col);
    std::vector<ItemId> hits;
    if (spec.kind == ColumnKind::kNumeric) {
        const double clicked = table.numeric(item, col);
        const double eps = config.eps_for(spec);
        for (ItemId r = 0; r < table.n_rows(); ++r) {
            const double v = table.numeric(r, col);
            if (!std::isnan(v) && std::abs(v - clicked) <= eps) hits.push_back(r);
        }
    } else {
        const int clicked = table.category(item, col);
        for (ItemId r = 0; r < table.n_rows(); ++r) {
            if (table.category(r, col) == clicked) hits.push_back(r);
        }
    }

    if (active_selection) {
        std::vector<ItemId> both;
        std::set_intersection(hits.begin(), hits.end(), active_selection->item_ids.begin(),
                              active_selection->item_ids.end(), std::back_inserter(both));
        hits = std::move(both);
    }
    if (hits.empty()) throw Error(ErrorCode::kEmptySelection, "no items match the clicked cell");
    return SelectionSet{std::move(hits), SelectionProvenance::kCellClick};
}

}  // namespace democlust
