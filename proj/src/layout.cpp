#include "democlust/layout.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "democlust/error.hpp"

namespace democlust {

namespace {

constexpr std::int64_t kUnassigned = -1;
constexpr std::int64_t kDeleted = -2;

std::vector<ItemId> sorted_unique(std::vector<ItemId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

const char* to_string(OpKind kind) noexcept {
    switch (kind) {
    case OpKind::kCreateFromSelection: return "create_from_selection";
    case OpKind::kMerge: return "merge";
    case OpKind::kSplitOut: return "split_out";
    case OpKind::kRemoveItems: return "remove_items";
    case OpKind::kRemoveCluster: return "remove_cluster";
    case OpKind::kSetWeights: return "set_weights";
    case OpKind::kLoadRecommendation: return "load_recommendation";
    }
    return "create_from_selection";
}

OpKind op_kind_from_string(std::string_view s) {
    for (auto k : {OpKind::kCreateFromSelection, OpKind::kMerge, OpKind::kSplitOut,
                   OpKind::kRemoveItems, OpKind::kRemoveCluster, OpKind::kSetWeights,
                   OpKind::kLoadRecommendation}) {
        if (s == to_string(k)) return k;
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown op kind '" + std::string(s) + "'");
}

const char* to_string(ClusterOrigin origin) noexcept {
    return origin == ClusterOrigin::kModel ? "model" : "user";
}

DemonstrationOp DemonstrationOp::create_from_selection(std::vector<ItemId> items) {
    DemonstrationOp op;
    op.kind = OpKind::kCreateFromSelection;
    op.items = std::move(items);
    return op;
}

DemonstrationOp DemonstrationOp::merge(ClusterId a, ClusterId b) {
    DemonstrationOp op;
    op.kind = OpKind::kMerge;
    op.a = a;
    op.b = b;
    return op;
}

DemonstrationOp DemonstrationOp::split_out(ClusterId source, std::vector<ItemId> items) {
    DemonstrationOp op;
    op.kind = OpKind::kSplitOut;
    op.cluster = source;
    op.items = std::move(items);
    return op;
}

DemonstrationOp DemonstrationOp::remove_items(std::vector<ItemId> items) {
    DemonstrationOp op;
    op.kind = OpKind::kRemoveItems;
    op.items = std::move(items);
    return op;
}

DemonstrationOp DemonstrationOp::remove_cluster(ClusterId id) {
    DemonstrationOp op;
    op.kind = OpKind::kRemoveCluster;
    op.cluster = id;
    return op;
}

DemonstrationOp DemonstrationOp::set_weights(std::vector<WeightedFeature> weights) {
    DemonstrationOp op;
    op.kind = OpKind::kSetWeights;
    op.weights = std::move(weights);
    return op;
}

DemonstrationOp DemonstrationOp::load_recommendation(std::string model,
                                                     std::vector<std::vector<ItemId>> groups) {
    DemonstrationOp op;
    op.kind = OpKind::kLoadRecommendation;
    op.model = std::move(model);
    op.groups = std::move(groups);
    return op;
}

WorkingLayout::WorkingLayout(std::size_t n_items)
    : n_items_(n_items), owner_(n_items, kUnassigned) {}

const WorkingCluster& WorkingLayout::cluster(ClusterId id) const {
    if (!has_cluster(id)) {
        throw Error(ErrorCode::kUnknownCluster, "unknown cluster " + std::to_string(id));
    }
    return *std::lower_bound(clusters_.begin(), clusters_.end(), id,
                             [](const WorkingCluster& c, ClusterId v) { return c.id < v; });
}

WorkingCluster& WorkingLayout::cluster(ClusterId id) {
    return const_cast<WorkingCluster&>(std::as_const(*this).cluster(id));
}

bool WorkingLayout::has_cluster(ClusterId id) const noexcept {
    auto it = std::lower_bound(clusters_.begin(), clusters_.end(), id,
                               [](const WorkingCluster& c, ClusterId v) { return c.id < v; });
    return it != clusters_.end() && it->id == id;
}

bool WorkingLayout::is_deleted(ItemId item) const {
    check_item(item);
    return owner_[item] == kDeleted;
}

std::optional<ClusterId> WorkingLayout::cluster_of(ItemId item) const {
    check_item(item);
    if (owner_[item] < 0) return std::nullopt;
    return owner_[item];
}

std::size_t WorkingLayout::assigned_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters_) n += c.members.size();
    return n;
}

std::vector<ItemId> WorkingLayout::unassigned() const {
    std::vector<ItemId> out;
    for (ItemId i = 0; i < n_items_; ++i) {
        if (owner_[i] == kUnassigned) out.push_back(i);
    }
    return out;
}

std::vector<ItemId> WorkingLayout::active_items() const {
    std::vector<ItemId> out;
    out.reserve(n_items_ - deleted_.size());
    for (ItemId i = 0; i < n_items_; ++i) {
        if (owner_[i] != kDeleted) out.push_back(i);
    }
    return out;
}

bool WorkingLayout::operator==(const WorkingLayout& other) const {
    if (n_items_ != other.n_items_ || next_id_ != other.next_id_ || deleted_ != other.deleted_ ||
        weights_ != other.weights_ || history_ != other.history_ ||
        clusters_.size() != other.clusters_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        const auto& x = clusters_[i];
        const auto& y = other.clusters_[i];
        if (x.id != y.id || x.members != y.members || x.color_tag != y.color_tag ||
            x.origin != y.origin) {
            return false;
        }
    }
    return true;
}

void WorkingLayout::check_item(ItemId item) const {
    if (item >= n_items_) {
        throw Error(ErrorCode::kUnknownItem, "unknown item " + std::to_string(item));
    }
}

void WorkingLayout::check_not_deleted(std::span<const ItemId> items) const {
    for (auto i : items) {
        check_item(i);
        if (owner_[i] == kDeleted) {
            throw Error(ErrorCode::kInvalidArgument, "item " + std::to_string(i) + " is deleted");
        }
    }
}

void WorkingLayout::detach(std::span<const ItemId> items) {
    std::set<ClusterId> touched;
    for (auto i : items) {
        if (owner_[i] >= 0) touched.insert(owner_[i]);
    }
    for (auto id : touched) {
        auto& c = cluster(id);
        std::vector<ItemId> kept;
        std::set_difference(c.members.begin(), c.members.end(), items.begin(), items.end(),
                            std::back_inserter(kept));
        c.members = std::move(kept);
        c.subpanel.reset();
    }
    std::erase_if(clusters_, [](const WorkingCluster& c) { return c.members.empty(); });
    for (auto i : items) owner_[i] = kUnassigned;
}

int WorkingLayout::free_color() const {
    std::vector<int> used;
    for (const auto& c : clusters_) used.push_back(c.color_tag);
    std::sort(used.begin(), used.end());
    int tag = 0;
    for (int u : used) {
        if (u == tag) ++tag;
        else if (u > tag) break;
    }
    return tag;
}

ClusterId WorkingLayout::add_cluster(std::vector<ItemId> members, ClusterOrigin origin) {
    WorkingCluster c;
    c.id = next_id_++;
    c.color_tag = free_color();
    c.origin = origin;
    for (auto i : members) owner_[i] = c.id;
    c.members = std::move(members);
    clusters_.push_back(std::move(c));  // ids are monotone, so order holds
    return clusters_.back().id;
}

void WorkingLayout::reindex() {
    std::fill(owner_.begin(), owner_.end(), kUnassigned);
    for (auto i : deleted_) owner_[i] = kDeleted;
    for (const auto& c : clusters_) {
        for (auto i : c.members) owner_[i] = c.id;
    }
}

ApplyResult WorkingLayout::apply(DemonstrationOp op) {
    ApplyResult result;
    switch (op.kind) {
    case OpKind::kCreateFromSelection: {
        auto items = sorted_unique(op.items);
        if (items.empty()) throw Error(ErrorCode::kEmptySelection, "selection is empty");
        check_not_deleted(items);
        detach(items);
        result.created = add_cluster(std::move(items), ClusterOrigin::kUser);
        break;
    }
    case OpKind::kMerge: {
        if (op.a == op.b) throw Error(ErrorCode::kInvalidArgument, "cannot merge a cluster with itself");
        const auto& ca = cluster(op.a);
        auto& cb = cluster(op.b);
        std::vector<ItemId> merged;
        std::merge(ca.members.begin(), ca.members.end(), cb.members.begin(), cb.members.end(),
                   std::back_inserter(merged));
        for (auto i : ca.members) owner_[i] = op.b;
        cb.members = std::move(merged);
        cb.origin = ClusterOrigin::kUser;
        cb.subpanel.reset();
        std::erase_if(clusters_, [&](const WorkingCluster& c) { return c.id == op.a; });
        break;
    }
    case OpKind::kSplitOut: {
        cluster(op.cluster);
        auto items = sorted_unique(op.items);
        if (items.empty()) throw Error(ErrorCode::kEmptySelection, "selection is empty");
        check_not_deleted(items);
        const auto first = owner_[items.front()];
        if (first >= 0 && cluster(first).members == items) {
            result.no_op = true;
            return result;
        }
        detach(items);
        result.created = add_cluster(std::move(items), ClusterOrigin::kUser);
        break;
    }
    case OpKind::kRemoveItems: {
        auto items = sorted_unique(op.items);
        if (items.empty()) throw Error(ErrorCode::kEmptySelection, "no items to remove");
        check_not_deleted(items);
        detach(items);
        std::vector<ItemId> all;
        std::merge(deleted_.begin(), deleted_.end(), items.begin(), items.end(), std::back_inserter(all));
        deleted_ = std::move(all);
        for (auto i : items) owner_[i] = kDeleted;
        break;
    }
    case OpKind::kRemoveCluster: {
        auto items = cluster(op.cluster).members;
        detach(items);
        std::vector<ItemId> all;
        std::merge(deleted_.begin(), deleted_.end(), items.begin(), items.end(), std::back_inserter(all));
        deleted_ = std::move(all);
        for (auto i : items) owner_[i] = kDeleted;
        break;
    }
    case OpKind::kSetWeights: {
        bool positive = false;
        for (const auto& w : op.weights) {
            if (!(w.weight >= 0.0)) {
                throw Error(ErrorCode::kInvalidArgument, "weight of '" + w.column + "' must be >= 0");
            }
            positive = positive || w.weight > 0.0;
        }
        if (!positive) throw Error(ErrorCode::kEmptyFeatures, "no feature has a positive weight");
        weights_ = op.weights;
        break;
    }
    case OpKind::kLoadRecommendation: {
        std::vector<ItemId> seen;
        for (const auto& g : op.groups) {
            if (g.empty()) throw Error(ErrorCode::kInvalidArgument, "empty cluster in recommendation");
            check_not_deleted(g);
            seen.insert(seen.end(), g.begin(), g.end());
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw Error(ErrorCode::kInvalidArgument, "recommendation clusters overlap");
        }
        clusters_.clear();
        reindex();
        for (const auto& g : op.groups) add_cluster(sorted_unique(g), ClusterOrigin::kModel);
        break;
    }
    }
    history_.push_back(std::move(op));
    return result;
}

WorkingLayout WorkingLayout::replay(std::size_t n_items, const std::vector<DemonstrationOp>& history) {
    WorkingLayout layout(n_items);
    for (const auto& op : history) layout.apply(op);
    return layout;
}

GroundTruthLabels derive_truth(const WorkingLayout& layout) {
    if (layout.clusters().empty()) throw Error(ErrorCode::kNoLabels, "layout has no clusters");
    GroundTruthLabels truth;
    int cls = 0;
    for (const auto& c : layout.clusters()) {
        for (auto i : c.members) truth.labels.emplace(i, cls);
        ++cls;
    }
    return truth;
}

}  // namespace democlust
