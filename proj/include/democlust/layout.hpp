#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "democlust/data_table.hpp"
#include "democlust/encoding.hpp"
#include "democlust/engines.hpp"
#include "democlust/metrics.hpp"

namespace democlust {

using ClusterId = std::int64_t;

enum class OpKind {
    kCreateFromSelection,
    kMerge,
    kSplitOut,
    kRemoveItems,
    kRemoveCluster,
    kSetWeights,
    kLoadRecommendation,
};

const char* to_string(OpKind kind) noexcept;
OpKind op_kind_from_string(std::string_view s);

/// One demonstration. Only the fields of its kind are meaningful.
struct DemonstrationOp {
    OpKind kind = OpKind::kCreateFromSelection;
    std::vector<ItemId> items;                 // create, split_out, remove_items
    ClusterId a = -1;                          // merge: dragged cluster
    ClusterId b = -1;                          // merge: drop target
    ClusterId cluster = -1;                    // split_out source, remove_cluster
    std::vector<WeightedFeature> weights;      // set_weights
    std::vector<std::vector<ItemId>> groups;   // load_recommendation
    std::string model;                         // load_recommendation label
    std::int64_t timestamp = 0;                // ms since epoch, informational

    static DemonstrationOp create_from_selection(std::vector<ItemId> items);
    static DemonstrationOp merge(ClusterId a, ClusterId b);
    static DemonstrationOp split_out(ClusterId source, std::vector<ItemId> items);
    static DemonstrationOp remove_items(std::vector<ItemId> items);
    static DemonstrationOp remove_cluster(ClusterId id);
    static DemonstrationOp set_weights(std::vector<WeightedFeature> weights);
    static DemonstrationOp load_recommendation(std::string model,
                                               std::vector<std::vector<ItemId>> groups);

    bool operator==(const DemonstrationOp&) const = default;
};

enum class ClusterOrigin { kModel, kUser };

const char* to_string(ClusterOrigin origin) noexcept;

struct Subpanel {
    SubClusterModel model;
    std::string feature;
};

struct WorkingCluster {
    ClusterId id = 0;
    std::vector<ItemId> members;  // sorted
    int color_tag = 0;
    ClusterOrigin origin = ClusterOrigin::kUser;
    std::optional<Subpanel> subpanel;
};

struct ApplyResult {
    /// split_out of exactly one whole cluster changes nothing and is not logged
    bool no_op = false;
    std::optional<ClusterId> created;
};

/**
 * The partition the user sees and edits.
 *
 * Every item is in exactly one of: a cluster, the deleted set, or
 * unassigned. Ops either apply completely and are appended to the history,
 * or throw and leave the layout untouched. Cluster ids are never reused and
 * color tags are the smallest ordinal not in use.
 */
class WorkingLayout {
public:
    WorkingLayout() = default;
    explicit WorkingLayout(std::size_t n_items);

    ApplyResult apply(DemonstrationOp op);

    /// Fresh layout over n_items with every op of `history` applied in order.
    static WorkingLayout replay(std::size_t n_items, const std::vector<DemonstrationOp>& history);

    std::size_t n_items() const noexcept { return n_items_; }
    const std::vector<WorkingCluster>& clusters() const noexcept { return clusters_; }
    const WorkingCluster& cluster(ClusterId id) const;
    WorkingCluster& cluster(ClusterId id);
    bool has_cluster(ClusterId id) const noexcept;
    const std::vector<ItemId>& deleted() const noexcept { return deleted_; }
    const std::vector<DemonstrationOp>& history() const noexcept { return history_; }
    /// Weights from the last set_weights op, empty if none.
    const std::vector<WeightedFeature>& weights() const noexcept { return weights_; }

    bool is_deleted(ItemId item) const;
    /// Cluster holding `item`, nullopt when unassigned or deleted.
    std::optional<ClusterId> cluster_of(ItemId item) const;
    std::size_t assigned_count() const;
    std::vector<ItemId> unassigned() const;
    /// Items not deleted, ascending.
    std::vector<ItemId> active_items() const;

    /// Equality ignores subpanels, which are view state.
    bool operator==(const WorkingLayout& other) const;

private:
    void check_item(ItemId item) const;
    void check_not_deleted(std::span<const ItemId> items) const;
    void detach(std::span<const ItemId> items);
    ClusterId add_cluster(std::vector<ItemId> members, ClusterOrigin origin);
    int free_color() const;
    void reindex();

    std::size_t n_items_ = 0;
    std::vector<WorkingCluster> clusters_;  // ascending id
    std::vector<ItemId> deleted_;           // ascending
    std::vector<WeightedFeature> weights_;
    std::vector<DemonstrationOp> history_;
    ClusterId next_id_ = 0;
    std::vector<std::int64_t> owner_;       // cluster id, kUnassigned or kDeleted
};

/**
 * Ground truth from the layout: one class per working cluster (class ids in
 * cluster order). Unassigned and deleted items are absent.
 * Throws Error(kNoLabels) when there are no clusters.
 */
GroundTruthLabels derive_truth(const WorkingLayout& layout);

}  // namespace democlust
