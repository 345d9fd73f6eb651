#include "democlust/json_io.hpp"

#include <cmath>

#include "democlust/error.hpp"

namespace democlust {

namespace {

Json number_or_null(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::vector<ItemId> item_list(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw Error(ErrorCode::kInvalidArgument, std::string("op needs an array '") + key + "'");
    }
    return j.at(key).get<std::vector<ItemId>>();
}

ClusterId cluster_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw Error(ErrorCode::kInvalidArgument, std::string("op needs an integer '") + key + "'");
    }
    return j.at(key).get<ClusterId>();
}

std::vector<WeightedFeature> weight_list(const Json& w) {
    std::vector<WeightedFeature> out;
    if (w.is_object()) {
        for (const auto& [name, value] : w.items()) out.push_back({name, value.get<double>()});
    } else if (w.is_array()) {
        for (const auto& e : w) out.push_back({e.at("column").get<std::string>(), e.at("weight").get<double>()});
    } else {
        throw Error(ErrorCode::kInvalidArgument, "weights must be an object or an array");
    }
    return out;
}

}  // namespace

Json to_json(const DemonstrationOp& op) {
    Json j;
    j["kind"] = to_string(op.kind);
    switch (op.kind) {
    case OpKind::kCreateFromSelection:
    case OpKind::kRemoveItems:
        j["items"] = op.items;
        break;
    case OpKind::kMerge:
        j["a"] = op.a;
        j["b"] = op.b;
        break;
    case OpKind::kSplitOut:
        j["source"] = op.cluster;
        j["items"] = op.items;
        break;
    case OpKind::kRemoveCluster:
        j["cluster"] = op.cluster;
        break;
    case OpKind::kSetWeights: {
        Json w = Json::array();
        for (const auto& f : op.weights) w.push_back({{"column", f.column}, {"weight", f.weight}});
        j["weights"] = std::move(w);
        break;
    }
    case OpKind::kLoadRecommendation:
        j["model"] = op.model;
        j["clusters"] = op.groups;
        break;
    }
    j["timestamp"] = op.timestamp;
    return j;
}

DemonstrationOp op_from_json(const Json& j) {
    try {
        if (!j.is_object() || !j.contains("kind")) {
            throw Error(ErrorCode::kInvalidArgument, "op needs a 'kind'");
        }
        DemonstrationOp op;
        op.kind = op_kind_from_string(j.at("kind").get<std::string>());
        switch (op.kind) {
        case OpKind::kCreateFromSelection:
        case OpKind::kRemoveItems:
            op.items = item_list(j, "items");
            break;
        case OpKind::kMerge:
            op.a = cluster_field(j, "a");
            op.b = cluster_field(j, "b");
            break;
        case OpKind::kSplitOut:
            op.cluster = cluster_field(j, "source");
            op.items = item_list(j, "items");
            break;
        case OpKind::kRemoveCluster:
            op.cluster = cluster_field(j, "cluster");
            break;
        case OpKind::kSetWeights:
            if (!j.contains("weights")) throw Error(ErrorCode::kInvalidArgument, "op needs 'weights'");
            op.weights = weight_list(j.at("weights"));
            break;
        case OpKind::kLoadRecommendation:
            op.model = j.value("model", std::string());
            if (!j.contains("clusters")) throw Error(ErrorCode::kInvalidArgument, "op needs 'clusters'");
            op.groups = j.at("clusters").get<std::vector<std::vector<ItemId>>>();
            break;
        }
        op.timestamp = j.value("timestamp", std::int64_t{0});
        return op;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("malformed op: ") + e.what());
    }
}

std::string ops_to_jsonl(const std::vector<DemonstrationOp>& ops) {
    std::string out;
    for (const auto& op : ops) {
        out += to_json(op).dump();
        out += '\n';
    }
    return out;
}

std::vector<DemonstrationOp> ops_from_jsonl(std::string_view text) {
    std::vector<DemonstrationOp> ops;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        try {
            ops.push_back(op_from_json(Json::parse(line)));
        } catch (const Error& e) {
            throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return ops;
}

Json to_json(const ModelCandidate& candidate) {
    Json params;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KMeansParams>) {
                params = {{"k", p.k}, {"max_iter", p.max_iter}, {"n_init", p.n_init}};
            } else if constexpr (std::is_same_v<T, DbscanParams>) {
                if (p.eps_percentile) params["eps_percentile"] = *p.eps_percentile;
                else params["eps"] = p.eps;
                params["min_pts"] = p.min_pts;
            } else if constexpr (std::is_same_v<T, AgglomerativeParams>) {
                params = {{"k", p.k}, {"linkage", to_string(p.linkage)}};
            } else {
                params = {{"k", p.k}};
            }
        },
        candidate.params);
    return {{"algorithm", to_string(candidate.algorithm())},
            {"params", params},
            {"seed", candidate.seed},
            {"label", candidate.label()}};
}

Json to_json(const FeatureSpec& spec) {
    Json j;
    j["mode"] = to_string(spec.mode);
    Json sel = Json::array();
    for (const auto& f : spec.selected) sel.push_back({{"column", f.column}, {"weight", f.weight}});
    j["selected"] = std::move(sel);
    if (spec.mode == FeatureMode::kSelectKBest) j["k_best"] = spec.k_best;
    if (spec.mode == FeatureMode::kPca) {
        j["pca_components"] = spec.pca_components;
        j["explained_variance_ratio"] = spec.explained_variance_ratio;
        Json loadings = Json::array();
        const Matrix& l = *spec.derived_loadings;
        for (std::size_t c = 0; c < l.rows(); ++c) {
            Json row = Json::object();
            for (std::size_t col = 0; col < l.cols(); ++col) row[spec.loading_columns[col]] = l(c, col);
            loadings.push_back(std::move(row));
        }
        j["derived_loadings"] = std::move(loadings);
    }
    return j;
}

Json to_json(const MetricBundle& m) {
    Json j;
    j["score"] = m.score;
    j["silhouette"] = number_or_null(m.silhouette);
    j["davies_bouldin"] = number_or_null(m.davies_bouldin);
    if (m.homogeneity) {
        j["homogeneity"] = number_or_null(m.homogeneity);
        j["ari"] = number_or_null(m.ari);
        j["fowlkes_mallows"] = number_or_null(m.fowlkes_mallows);
        j["nmi"] = number_or_null(m.nmi);
    }
    return j;
}

Json to_json(const DescriptionPayload& d) {
    return {{"n_clusters", d.n_clusters},
            {"top_features", d.top_features},
            {"cluster_sizes", d.cluster_sizes},
            {"unclustered", d.unclustered},
            {"sentence", d.sentence}};
}

Json to_json(const ModelResult& r, bool assignments) {
    Json j;
    j["candidate"] = to_json(r.candidate);
    j["n_clusters"] = r.assignment.n_clusters;
    j["metrics"] = to_json(r.metrics);
    j["description"] = to_json(r.description);
    j["feature_spec"] = to_json(r.feature_spec);
    if (assignments) {
        j["item_ids"] = r.assignment.item_ids;
        j["labels"] = r.assignment.labels;
    }
    return j;
}

Json to_json(const RecommendationSet& recs, bool assignments) {
    Json j;
    j["generation"] = recs.generation;
    j["stale"] = recs.stale;
    j["mismatch"] = recs.mismatch;
    j["current_shown"] = recs.current_shown ? to_json(*recs.current_shown, assignments) : Json(nullptr);
    Json ranked = Json::array();
    for (std::size_t i = 0; i < recs.ranked.size(); ++i) {
        auto r = to_json(recs.ranked[i], assignments);
        r["rank"] = i + 1;
        ranked.push_back(std::move(r));
    }
    j["ranked"] = std::move(ranked);
    Json failures = Json::array();
    for (const auto& f : recs.failures) failures.push_back({{"candidate", f.candidate}, {"reason", f.reason}});
    j["failures"] = std::move(failures);
    return j;
}

Json to_json(const WorkingLayout& layout) {
    Json clusters = Json::array();
    for (const auto& c : layout.clusters()) {
        clusters.push_back({{"cluster_id", c.id},
                            {"members", c.members},
                            {"color_tag", c.color_tag},
                            {"origin", to_string(c.origin)}});
    }
    return {{"n_items", layout.n_items()},
            {"clusters", std::move(clusters)},
            {"deleted", layout.deleted()},
            {"unassigned", layout.unassigned().size()},
            {"history_length", layout.history().size()}};
}

Json to_json(const LayoutCoordinates& coords) {
    Json clusters = Json::array();
    for (const auto& c : coords.clusters) {
        Json items = Json::array();
        for (const auto& p : c.items) items.push_back({{"item_id", p.item}, {"x", p.x}, {"y", p.y}});
        clusters.push_back({{"cluster_id", c.cluster},
                            {"anchor", {{"x", c.x}, {"y", c.y}}},
                            {"radius", c.radius},
                            {"items", std::move(items)}});
    }
    return {{"clusters", std::move(clusters)}};
}

Json to_json(const Histogram& h) {
    Json j;
    j["feature"] = h.feature;
    j["kind"] = to_string(h.kind);
    j["labels"] = h.labels;
    if (!h.edges.empty()) j["edges"] = h.edges;
    j["counts"] = h.counts;
    j["missing"] = h.missing;
    return j;
}

Json to_json(const SubClusterModel& m) {
    Json groups = Json::array();
    for (const auto& g : m.assignment.clusters()) groups.push_back(g);
    Json noise = Json::array();
    for (std::size_t r = 0; r < m.assignment.labels.size(); ++r) {
        if (m.assignment.labels[r] == kNoise) noise.push_back(m.assignment.item_ids[r]);
    }
    return {{"parent_cluster", m.parent_cluster},
            {"candidate", to_json(m.candidate)},
            {"rotation_index", m.rotation_index},
            {"refresh_count", m.refresh_count},
            {"n_clusters", m.assignment.n_clusters},
            {"clusters", std::move(groups)},
            {"unclustered", std::move(noise)}};
}

Json to_json(const SelectionSet& s) {
    return {{"item_ids", s.item_ids}, {"provenance", to_string(s.provenance)}, {"size", s.size()}};
}

}  // namespace democlust
