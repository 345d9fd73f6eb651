#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "democlust/data_table.hpp"
#include "democlust/encoding.hpp"
#include "democlust/engines.hpp"
#include "democlust/layout.hpp"

namespace democlust {

inline constexpr std::size_t kHistogramBins = 10;

/// Distribution of one column over a set of items. Numeric columns use ten
/// equal-width bins over the column's full-dataset range so that charts of
/// different clusters line up; categorical columns get one bar per category.
struct Histogram {
    std::string feature;
    ColumnKind kind = ColumnKind::kNumeric;
    std::vector<std::string> labels;  // bin ranges or category names
    std::vector<double> edges;        // numeric only, kHistogramBins + 1 values
    std::vector<std::size_t> counts;
    std::size_t missing = 0;
};

Histogram histogram(const DataTable& table, std::string_view feature, std::span<const ItemId> items);

struct SubpanelView {
    SubClusterModel model;
    Histogram histogram;
};

/**
 * Sub-cluster a working cluster and chart `feature` over its members. The
 * model is remembered on the cluster; asking again rotates to the next
 * (algorithm, hyperparameters) pair. Throws Error(kTooSmall) below 4 members.
 */
SubpanelView open_subpanel(WorkingLayout& layout, const DataTable& table, const EncodedMatrix& matrix,
                           ClusterId cluster, std::string_view feature, std::uint64_t seed = 0);

struct ItemPosition {
    ItemId item = 0;
    double x = 0.0;
    double y = 0.0;
};

struct ClusterPlacement {
    ClusterId cluster = 0;
    double x = 0.0;  // hull anchor
    double y = 0.0;
    double radius = 0.0;
    std::vector<ItemPosition> items;  // innermost first
};

struct LayoutCoordinates {
    std::vector<ClusterPlacement> clusters;  // layout order
};

/**
 * Deterministic 2D placement in the unit square. Cluster discs (radius
 * proportional to sqrt(size)) are packed greedily from the centre; items fill
 * a sunflower spiral in ascending order of distance to their cluster's
 * centroid (ties by item id), so display radius is monotone in model
 * distance. Unassigned and deleted items are not placed.
 */
LayoutCoordinates layout_coords(const WorkingLayout& layout, const EncodedMatrix& matrix);

/**
 * The original table with a trailing cluster column: the cluster id,
 * "deleted" or "unassigned". If a column is already named "cluster" the new
 * one is named "cluster_1" (or the next free suffix).
 * Throws Error(kEmptyLayout) when the layout has no clusters.
 */
std::string export_csv(const WorkingLayout& layout, const DataTable& table, char delimiter = ',');

}  // namespace democlust
