#include "democlust/encoding.hpp"

#include <cmath>
#include <unordered_map>

#include "democlust/error.hpp"

namespace democlust {

EncodedMatrix::EncodedMatrix(Matrix values, std::vector<EncodedDimension> dims,
                             std::vector<ItemId> item_ids)
    : values_(std::move(values)), dims_(std::move(dims)), item_ids_(std::move(item_ids)) {
    if (dims_.size() != values_.cols() || item_ids_.size() != values_.rows()) {
        throw Error(ErrorCode::kInvalidArgument, "encoded matrix shape mismatch");
    }
}

EncodedMatrix EncodedMatrix::from_values(Matrix values) {
    std::vector<EncodedDimension> dims(values.cols());
    for (std::size_t d = 0; d < dims.size(); ++d) {
        dims[d].column = d;
        dims[d].column_name = "x" + std::to_string(d);
    }
    std::vector<ItemId> ids(values.rows());
    for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = r;
    return EncodedMatrix(std::move(values), std::move(dims), std::move(ids));
}

std::size_t EncodedMatrix::row_of(ItemId item) const {
    // item_ids are usually the identity prefix
    if (item < item_ids_.size() && item_ids_[item] == item) return item;
    for (std::size_t r = 0; r < item_ids_.size(); ++r) {
        if (item_ids_[r] == item) return r;
    }
    throw Error(ErrorCode::kUnknownItem, "item " + std::to_string(item) + " is not in the matrix");
}

EncodedMatrix EncodedMatrix::select_items(std::span<const ItemId> items) const {
    std::unordered_map<ItemId, std::size_t> index;
    index.reserve(item_ids_.size());
    for (std::size_t r = 0; r < item_ids_.size(); ++r) index.emplace(item_ids_[r], r);

    Matrix out(items.size(), dims());
    std::vector<ItemId> ids(items.begin(), items.end());
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto it = index.find(items[i]);
        if (it == index.end()) {
            throw Error(ErrorCode::kUnknownItem,
                        "item " + std::to_string(items[i]) + " is not in the matrix");
        }
        auto src = values_.row(it->second);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return EncodedMatrix(std::move(out), dims_, std::move(ids));
}

std::vector<std::size_t> EncodedMatrix::decode_columns() const {
    std::vector<std::size_t> cols;
    cols.reserve(dims_.size());
    for (const auto& d : dims_) cols.push_back(d.column);
    return cols;
}

std::vector<WeightedFeature> all_features(const DataTable& table) {
    std::vector<WeightedFeature> out;
    for (const auto& c : table.columns()) out.push_back({c.name, 1.0});
    return out;
}

EncodedMatrix encode(const DataTable& table, std::span<const WeightedFeature> features) {
    if (features.empty()) throw Error(ErrorCode::kEmptyFeatures, "no features selected");
    bool any_positive = false;
    std::vector<std::size_t> cols;
    for (const auto& f : features) {
        if (!(f.weight >= 0.0) || !std::isfinite(f.weight)) {
            throw Error(ErrorCode::kInvalidArgument, "weight of '" + f.column + "' must be >= 0");
        }
        cols.push_back(table.column_index(f.column));
        any_positive = any_positive || f.weight > 0.0;
    }
    if (!any_positive) throw Error(ErrorCode::kEmptyFeatures, "all features have weight 0");

    std::vector<EncodedDimension> dims;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& spec = table.column(cols[i]);
        const double w = features[i].weight;
        if (spec.kind == ColumnKind::kNumeric) {
            EncodedDimension d;
            d.column = cols[i];
            d.column_name = spec.name;
            d.offset = spec.mean;
            d.scale = spec.stddev > 0.0 ? w / spec.stddev : 0.0;
            dims.push_back(std::move(d));
        } else {
            const double group = 1.0 / std::sqrt(static_cast<double>(spec.categories.size()));
            for (const auto& cat : spec.categories) {
                EncodedDimension d;
                d.column = cols[i];
                d.column_name = spec.name;
                d.category = cat;
                d.offset = 0.0;
                d.scale = w * group;
                dims.push_back(std::move(d));
            }
        }
    }

    const std::size_t n = table.n_rows();
    Matrix values(n, dims.size());
    std::size_t d = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const std::size_t c = cols[i];
        const auto& spec = table.column(c);
        if (spec.kind == ColumnKind::kNumeric) {
            const auto& dim = dims[d];
            for (ItemId r = 0; r < n; ++r) {
                const double v = table.numeric(r, c);
                values(r, d) = std::isnan(v) ? 0.0 : (v - dim.offset) * dim.scale;
            }
            ++d;
        } else {
            const std::size_t width = spec.categories.size();
            for (ItemId r = 0; r < n; ++r) {
                const int code = table.category(r, c);
                if (code != DataTable::kMissingCategory) {
                    values(r, d + static_cast<std::size_t>(code)) = dims[d + code].scale;
                }
            }
            d += width;
        }
    }

    std::vector<ItemId> ids(n);
    for (ItemId r = 0; r < n; ++r) ids[r] = r;
    return EncodedMatrix(std::move(values), std::move(dims), std::move(ids));
}

}  // namespace democlust
