#include "democlust/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "democlust/csv.hpp"
#include "democlust/error.hpp"

namespace democlust {

Histogram histogram(const DataTable& table, std::string_view feature, std::span<const ItemId> items) {
    const std::size_t col = table.column_index(feature);
    const auto& spec = table.column(col);
    Histogram h;
    h.feature = spec.name;
    h.kind = spec.kind;

    if (spec.kind == ColumnKind::kCategorical) {
        h.labels = spec.categories;
        h.counts.assign(spec.categories.size(), 0);
        for (auto i : items) {
            const int c = table.category(i, col);
            if (c < 0) ++h.missing;
            else ++h.counts[static_cast<std::size_t>(c)];
        }
        return h;
    }

    const double lo = spec.min;
    const double width = spec.range() / static_cast<double>(kHistogramBins);
    h.counts.assign(kHistogramBins, 0);
    for (std::size_t b = 0; b <= kHistogramBins; ++b) {
        h.edges.push_back(b == kHistogramBins ? spec.max : lo + width * static_cast<double>(b));
    }
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g-%g", h.edges[b], h.edges[b + 1]);
        h.labels.emplace_back(buf);
    }
    for (auto i : items) {
        const double v = table.numeric(i, col);
        if (std::isnan(v)) {
            ++h.missing;
            continue;
        }
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>(std::floor((v - lo) / width));
            b = std::min(b, kHistogramBins - 1);
        }
        ++h.counts[b];
    }
    return h;
}

SubpanelView open_subpanel(WorkingLayout& layout, const DataTable& table, const EncodedMatrix& matrix,
                           ClusterId cluster, std::string_view feature, std::uint64_t seed) {
    auto& c = layout.cluster(cluster);
    table.column_index(feature);
    const SubClusterModel* previous = c.subpanel ? &c.subpanel->model : nullptr;
    auto model = subcluster(matrix, cluster, c.members, previous, seed);
    SubpanelView view{model, histogram(table, feature, c.members)};
    c.subpanel = Subpanel{std::move(model), std::string(feature)};
    return view;
}

namespace {

struct Disc {
    double x = 0.0, y = 0.0, r = 0.0;
};

bool fits(const Disc& d, const std::vector<Disc>& placed) {
    if (d.x - d.r < 0.0 || d.x + d.r > 1.0 || d.y - d.r < 0.0 || d.y + d.r > 1.0) return false;
    for (const auto& p : placed) {
        const double dx = d.x - p.x, dy = d.y - p.y;
        if (dx * dx + dy * dy < (d.r + p.r) * (d.r + p.r)) return false;
    }
    return true;
}

// Greedy packing: each disc, largest first, goes to the free grid point
// nearest the centre. Radii shrink until everything fits.
std::vector<Disc> pack(const std::vector<std::size_t>& sizes) {
    const std::size_t m = sizes.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] > sizes[b]; });

    double total = 0.0;
    for (auto s : sizes) total += static_cast<double>(s);
    double scale = std::sqrt(0.45 / (std::numbers::pi * std::max(total, 1.0)));

    constexpr int kGrid = 64;
    std::vector<std::pair<double, double>> grid;
    for (int i = 0; i <= kGrid; ++i) {
        for (int j = 0; j <= kGrid; ++j) grid.emplace_back(double(i) / kGrid, double(j) / kGrid);
    }
    std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) {
        const double da = (a.first - 0.5) * (a.first - 0.5) + (a.second - 0.5) * (a.second - 0.5);
        const double db = (b.first - 0.5) * (b.first - 0.5) + (b.second - 0.5) * (b.second - 0.5);
        return da < db;
    });

    for (;;) {
        std::vector<Disc> placed;
        std::vector<Disc> out(m);
        bool ok = true;
        for (auto idx : order) {
            Disc d;
            d.r = scale * std::sqrt(static_cast<double>(sizes[idx]));
            bool found = false;
            for (const auto& [x, y] : grid) {
                d.x = x;
                d.y = y;
                if (fits(d, placed)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                ok = false;
                break;
            }
            placed.push_back(d);
            out[idx] = d;
        }
        if (ok) return out;
        scale *= 0.9;
    }
}

std::vector<Disc> grid_discs(std::size_t m) {
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    const double cell = 1.0 / static_cast<double>(side);
    std::vector<Disc> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = {cell * (static_cast<double>(i % side) + 0.5), cell * (static_cast<double>(i / side) + 0.5),
                  cell * 0.45};
    }
    return out;
}

}  // namespace

LayoutCoordinates layout_coords(const WorkingLayout& layout, const EncodedMatrix& matrix) {
    LayoutCoordinates out;
    const auto& clusters = layout.clusters();
    if (clusters.empty()) return out;

    std::vector<std::size_t> sizes;
    for (const auto& c : clusters) sizes.push_back(c.members.size());
    std::vector<Disc> discs;
    if (clusters.size() == 1) {
        discs.push_back({0.5, 0.5, 0.45});
    } else if (clusters.size() > 200) {
        discs = grid_discs(clusters.size());
    } else {
        discs = pack(sizes);
    }

    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const std::size_t d = matrix.dims();
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const auto& c = clusters[ci];
        std::vector<double> centroid(d, 0.0);
        std::vector<std::size_t> rows;
        for (auto item : c.members) {
            rows.push_back(matrix.row_of(item));
            const auto x = matrix.row(rows.back());
            for (std::size_t j = 0; j < d; ++j) centroid[j] += x[j];
        }
        for (auto& v : centroid) v /= static_cast<double>(c.members.size());

        std::vector<std::pair<double, ItemId>> ranked;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            ranked.emplace_back(squared_distance(matrix.row(rows[k]), centroid), c.members[k]);
        }
        std::sort(ranked.begin(), ranked.end());

        ClusterPlacement p;
        p.cluster = c.id;
        p.x = discs[ci].x;
        p.y = discs[ci].y;
        p.radius = discs[ci].r;
        const double m = static_cast<double>(ranked.size());
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            const double rho = p.radius * std::sqrt(static_cast<double>(k) / m);
            const double theta = golden * static_cast<double>(k);
            p.items.push_back({ranked[k].second, p.x + rho * std::cos(theta), p.y + rho * std::sin(theta)});
        }
        out.clusters.push_back(std::move(p));
    }
    return out;
}

std::string export_csv(const WorkingLayout& layout, const DataTable& table, char delimiter) {
    if (layout.clusters().empty()) throw Error(ErrorCode::kEmptyLayout, "layout has no clusters");
    std::vector<std::string> header;
    for (const auto& c : table.columns()) header.push_back(c.name);
    std::string name = "cluster";
    for (int suffix = 1; table.find_column(name); ++suffix) name = "cluster_" + std::to_string(suffix);
    header.push_back(name);

    std::string out;
    csv::append_record(out, header, delimiter);
    std::vector<std::string> fields(header.size());
    for (ItemId i = 0; i < table.n_rows(); ++i) {
        for (std::size_t c = 0; c < table.n_columns(); ++c) fields[c] = table.raw(i, c);
        if (layout.is_deleted(i)) {
            fields.back() = "deleted";
        } else if (auto id = layout.cluster_of(i)) {
            fields.back() = std::to_string(*id);
        } else {
            fields.back() = "unassigned";
        }
        csv::append_record(out, fields, delimiter);
    }
    return out;
}

}  // namespace democlust
