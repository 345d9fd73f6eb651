#include "democlust/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "democlust/eigen.hpp"
#include "democlust/error.hpp"

namespace democlust {

const char* to_string(FeatureMode mode) noexcept {
    switch (mode) {
    case FeatureMode::kUser: return "user";
    case FeatureMode::kSelectKBest: return "select_k_best";
    case FeatureMode::kPca: return "pca";
    }
    return "user";
}

FeatureMode feature_mode_from_string(std::string_view s) {
    if (s == "user") return FeatureMode::kUser;
    if (s == "select_k_best") return FeatureMode::kSelectKBest;
    if (s == "pca") return FeatureMode::kPca;
    throw Error(ErrorCode::kInvalidArgument, "unknown feature mode '" + std::string(s) + "'");
}

void FeatureSpec::validate(const DataTable& table) const {
    if (mode == FeatureMode::kPca) {
        if (pca_components < 1 || !pca_axes) {
            throw Error(ErrorCode::kInvalidArgument, "PCA spec has no components");
        }
        return;
    }
    if (selected.empty()) throw Error(ErrorCode::kEmptyFeatures, "no features selected");
    bool positive = false;
    for (const auto& f : selected) {
        table.column_index(f.column);
        if (!(f.weight >= 0.0)) {
            throw Error(ErrorCode::kInvalidArgument, "weight of '" + f.column + "' must be >= 0");
        }
        positive = positive || f.weight > 0.0;
    }
    if (!positive) throw Error(ErrorCode::kEmptyFeatures, "all features have weight 0");
    if (mode == FeatureMode::kSelectKBest &&
        (k_best < 1 || static_cast<std::size_t>(k_best) > table.n_columns())) {
        throw Error(ErrorCode::kInvalidArgument, "k_best out of range");
    }
}

FeatureSpec user_features(std::vector<WeightedFeature> selected) {
    FeatureSpec spec;
    spec.mode = FeatureMode::kUser;
    spec.selected = std::move(selected);
    return spec;
}

namespace {

std::vector<double> column_variances(const EncodedMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<double> var(m.dims(), 0.0);
    for (std::size_t j = 0; j < m.dims(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += m.values()(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = m.values()(i, j) - mean;
            ss += d * d;
        }
        var[j] = ss / static_cast<double>(n);
    }
    return var;
}

// Score per table column = max over its encoded dimensions.
std::vector<double> per_column_max(const EncodedMatrix& m, const std::vector<double>& dim_scores,
                                   std::size_t n_columns) {
    std::vector<double> out(n_columns, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < m.dims(); ++j) {
        auto& s = out[m.feature_map()[j].column];
        s = std::max(s, dim_scores[j]);
    }
    return out;
}

FeatureSpec top_k(const DataTable& table, int k, const std::vector<double>& scores) {
    if (k < 1 || static_cast<std::size_t>(k) > table.n_columns()) {
        throw Error(ErrorCode::kInvalidArgument, "k must be in 1.." + std::to_string(table.n_columns()));
    }
    std::vector<std::size_t> order(table.n_columns());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());

    FeatureSpec spec;
    spec.mode = FeatureMode::kSelectKBest;
    spec.k_best = k;
    for (auto c : order) spec.selected.push_back({table.column(c).name, 1.0});
    return spec;
}

// Variances are quantized so that columns equal up to rounding tie exactly.
double quantize(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

FeatureSpec select_k_best(const DataTable& table, int k) {
    const auto m = encode(table, all_features(table));
    auto var = column_variances(m);
    for (auto& v : var) v = quantize(v);
    return top_k(table, k, per_column_max(m, var, table.n_columns()));
}

FeatureSpec select_k_best(const DataTable& table, int k, const GroundTruthLabels& truth) {
    if (truth.m() < 2) return select_k_best(table, k);
    const auto full = encode(table, all_features(table));

    std::vector<ItemId> items;
    std::vector<int> classes;
    for (const auto& [item, c] : truth.labels) {
        if (item < table.n_rows()) {
            items.push_back(item);
            classes.push_back(c);
        }
    }
    const auto m = full.select_items(items);
    const std::size_t n = m.rows();
    std::vector<int> uniq(classes);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const std::size_t g = uniq.size();
    if (g < 2 || n <= g) return select_k_best(table, k);

    std::vector<std::size_t> code(n);
    for (std::size_t i = 0; i < n; ++i) {
        code[i] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), classes[i]) - uniq.begin());
    }

    std::vector<double> f(m.dims(), 0.0);
    for (std::size_t j = 0; j < m.dims(); ++j) {
        std::vector<double> sum(g, 0.0);
        std::vector<std::size_t> cnt(g, 0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum[code[i]] += m.values()(i, j);
            ++cnt[code[i]];
            grand += m.values()(i, j);
        }
        grand /= static_cast<double>(n);
        double between = 0.0, within = 0.0;
        for (std::size_t c = 0; c < g; ++c) {
            const double mean = sum[c] / static_cast<double>(cnt[c]);
            between += static_cast<double>(cnt[c]) * (mean - grand) * (mean - grand);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double mean = sum[code[i]] / static_cast<double>(cnt[code[i]]);
            const double d = m.values()(i, j) - mean;
            within += d * d;
        }
        const double msb = between / static_cast<double>(g - 1);
        const double msw = within / static_cast<double>(n - g);
        if (msw > 1e-300) {
            f[j] = msb / msw;
        } else {
            f[j] = msb > 1e-300 ? std::numeric_limits<double>::infinity() : 0.0;
        }
    }
    return top_k(table, k, per_column_max(m, f, table.n_columns()));
}

FeatureSpec default_features(const DataTable& table) {
    return select_k_best(table, static_cast<int>(std::min<std::size_t>(8, table.n_columns())));
}

FeatureSpec pca_features(const DataTable& table, int n_components) {
    const auto m = encode(table, all_features(table));
    const std::size_t n = m.rows();
    const std::size_t d = m.dims();
    if (n_components < 1 || static_cast<std::size_t>(n_components) > std::min(n, d)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "n_components must be in 1.." + std::to_string(std::min(n, d)));
    }

    std::vector<double> centre(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) centre[j] += m.values()(i, j);
    }
    for (auto& c : centre) c /= static_cast<double>(n);
    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = m.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = x[a] - centre[a];
            for (std::size_t b = a; b < d; ++b) cov(a, b) += xa * (x[b] - centre[b]);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= static_cast<double>(n);
            cov(b, a) = cov(a, b);
        }
    }

    const auto eig = jacobi_eigen(cov);
    const auto nc = static_cast<std::size_t>(n_components);
    double total = 0.0;
    for (double v : eig.values) total += std::max(v, 0.0);

    FeatureSpec spec;
    spec.mode = FeatureMode::kPca;
    spec.pca_components = n_components;
    spec.pca_centre = centre;
    Matrix axes(nc, d);
    Matrix loadings(nc, table.n_columns());
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t src = d - 1 - c;  // eigenvalues ascending
        const double ev = std::max(eig.values[src], 0.0);
        spec.explained_variance.push_back(ev);
        spec.explained_variance_ratio.push_back(total > 0.0 ? ev / total : 0.0);
        std::vector<double> group_sq(table.n_columns(), 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = eig.vectors(j, src);
            axes(c, j) = v;
            const auto& dim = m.feature_map()[j];
            if (dim.category) {
                group_sq[dim.column] += v * v;
            } else {
                loadings(c, dim.column) = v;
            }
        }
        for (std::size_t col = 0; col < table.n_columns(); ++col) {
            if (table.column(col).kind == ColumnKind::kCategorical) {
                loadings(c, col) = std::sqrt(group_sq[col]);
            }
        }
    }
    spec.pca_axes = std::move(axes);
    spec.derived_loadings = std::move(loadings);
    for (const auto& c : table.columns()) spec.loading_columns.push_back(c.name);
    spec.selected = all_features(table);
    return spec;
}

EncodedMatrix apply_weights(const FeatureSpec& spec, const DataTable& table) {
    if (spec.mode != FeatureMode::kPca) {
        spec.validate(table);
        return encode(table, spec.selected);
    }
    spec.validate(table);
    const auto m = encode(table, all_features(table));
    const Matrix& axes = *spec.pca_axes;
    if (axes.cols() != m.dims() || spec.pca_centre.size() != m.dims()) {
        throw Error(ErrorCode::kInvalidArgument, "PCA spec does not match this table");
    }
    const std::size_t nc = axes.rows();
    Matrix projected(m.rows(), nc);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto x = m.row(i);
        for (std::size_t c = 0; c < nc; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.dims(); ++j) s += (x[j] - spec.pca_centre[j]) * axes(c, j);
            projected(i, c) = s;
        }
    }
    std::vector<EncodedDimension> dims(nc);
    const Matrix& loadings = *spec.derived_loadings;
    for (std::size_t c = 0; c < nc; ++c) {
        std::size_t best = 0;
        for (std::size_t col = 1; col < loadings.cols(); ++col) {
            if (std::abs(loadings(c, col)) > std::abs(loadings(c, best))) best = col;
        }
        dims[c].column = best;
        dims[c].column_name = table.column(best).name;
        dims[c].component = c;
    }
    return EncodedMatrix(std::move(projected), std::move(dims), m.item_ids());
}

}  // namespace democlust
