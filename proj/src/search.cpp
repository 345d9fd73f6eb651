#include "democlust/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "democlust/distances.hpp"
#include "democlust/error.hpp"

namespace democlust {

const ModelResult& RecommendationSet::at_rank(std::size_t rank) const {
    if (rank == 0 && current_shown) return *current_shown;
    if (rank >= 1 && rank <= ranked.size()) return ranked[rank - 1];
    throw Error(ErrorCode::kInvalidArgument, "no recommendation at rank " + std::to_string(rank));
}

std::vector<ModelCandidate> enumerate_space(std::size_t n_rows, const SearchConstraints& constraints,
                                            std::uint64_t seed) {
    const int k_cap = static_cast<int>(std::min<std::size_t>(10, n_rows > 0 ? n_rows - 1 : 0));
    std::vector<int> ks;
    if (constraints.desired_k) {
        const int k = *constraints.desired_k;
        if (k < 2 || static_cast<std::size_t>(k) >= std::max<std::size_t>(n_rows, 1)) {
            throw Error(ErrorCode::kInfeasibleK, "desired k must be in 2.." + std::to_string(n_rows > 1 ? n_rows - 1 : 1));
        }
        ks.push_back(k);
    } else {
        for (int k = 2; k <= k_cap; ++k) ks.push_back(k);
    }

    std::vector<ModelCandidate> out;
    for (int k : ks) out.push_back({KMeansParams{k, 300, 5}, seed});
    if (n_rows >= 2) {
        for (double pct : {10.0, 25.0, 50.0}) {
            for (int min_pts : {4, 8}) out.push_back({DbscanParams{pct, 0.0, min_pts}, seed});
        }
    }
    for (auto linkage : {Linkage::kWard, Linkage::kAverage, Linkage::kComplete}) {
        for (int k : ks) out.push_back({AgglomerativeParams{k, linkage}, seed});
    }
    if (n_rows >= 3) {
        for (int k : ks) {
            if (k <= kMaxSpectralK) out.push_back({SpectralParams{k}, seed});
        }
    }
    return out;
}

bool ranks_before(const ModelResult& a, const ModelResult& b) {
    if (a.metrics.score != b.metrics.score) return a.metrics.score > b.metrics.score;
    const double sa = a.metrics.silhouette.value_or(-2.0);
    const double sb = b.metrics.silhouette.value_or(-2.0);
    if (sa != sb) return sa > sb;
    const std::string_view na = to_string(a.candidate.algorithm());
    const std::string_view nb = to_string(b.candidate.algorithm());
    if (na != nb) return na < nb;
    return a.candidate.param_tuple() < b.candidate.param_tuple();
}

std::vector<double> feature_contributions(const FeatureSpec& spec, const EncodedMatrix& matrix,
                                          std::size_t n_columns) {
    std::vector<double> out(n_columns, 0.0);
    if (spec.mode == FeatureMode::kPca && spec.derived_loadings) {
        const Matrix& l = *spec.derived_loadings;
        for (std::size_t c = 0; c < l.rows(); ++c) {
            for (std::size_t col = 0; col < std::min(n_columns, l.cols()); ++col) {
                out[col] += spec.explained_variance[c] * l(c, col) * l(c, col);
            }
        }
        return out;
    }
    const std::size_t n = matrix.rows();
    for (std::size_t j = 0; j < matrix.dims(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += matrix.values()(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = matrix.values()(i, j) - mean;
            ss += d * d;
        }
        const auto col = matrix.feature_map()[j].column;
        if (col < n_columns) out[col] += ss / static_cast<double>(n);
    }
    return out;
}

std::vector<std::string> top_features(const FeatureSpec& spec, const EncodedMatrix& matrix,
                                      const DataTable& table) {
    const auto contrib = feature_contributions(spec, matrix, table.n_columns());
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < contrib.size(); ++c) {
        if (contrib[c] > 1e-12) order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return contrib[a] > contrib[b]; });
    if (order.size() > 3) order.resize(3);
    std::vector<std::string> names;
    for (auto c : order) names.push_back(table.column(c).name);
    return names;
}

DescriptionPayload describe(const ClusterAssignment& assignment,
                            const std::vector<std::string>& top_features) {
    DescriptionPayload d;
    d.n_clusters = assignment.n_clusters;
    d.top_features = top_features;
    d.cluster_sizes = assignment.cluster_sizes();
    d.unclustered = assignment.noise_count();

    std::string s = std::to_string(d.n_clusters) + (d.n_clusters == 1 ? " cluster" : " clusters");
    if (!top_features.empty()) {
        s += " based on ";
        for (std::size_t i = 0; i < top_features.size(); ++i) {
            if (i) s += ", ";
            s += top_features[i];
        }
    }
    s += "; sizes ";
    for (std::size_t i = 0; i < d.cluster_sizes.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(d.cluster_sizes[i]);
    }
    if (d.unclustered > 0) s += "; " + std::to_string(d.unclustered) + " unclustered";
    s += ".";
    d.sentence = std::move(s);
    return d;
}

namespace {

// Shared intermediate results so that every candidate of one search reuses
// the distance table, dendrograms and spectral embedding.
class CandidateRunner {
public:
    CandidateRunner(const EncodedMatrix& matrix, const PairwiseDistances& distances)
        : matrix_(matrix), distances_(distances) {}

    ClusterAssignment run(const ModelCandidate& candidate) {
        return std::visit(
            [&](const auto& p) -> ClusterAssignment {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, KMeansParams>) {
                    return run_kmeans(matrix_, p.k, p.max_iter, candidate.seed, p.n_init).assignment;
                } else if constexpr (std::is_same_v<T, DbscanParams>) {
                    const double eps = p.eps_percentile
                                           ? dbscan_eps_from_percentile(distances_, *p.eps_percentile)
                                           : p.eps;
                    return run_dbscan(matrix_, distances_, eps, p.min_pts);
                } else if constexpr (std::is_same_v<T, AgglomerativeParams>) {
                    if (p.k < 2 || static_cast<std::size_t>(p.k) > matrix_.rows()) {
                        throw Error(ErrorCode::kInfeasibleK, "k out of range");
                    }
                    const auto& dendrogram = cached(dendrograms_[static_cast<int>(p.linkage)], [&] {
                        return Dendrogram::build(matrix_, distances_, p.linkage);
                    });
                    return make_assignment(matrix_, dendrogram.cut(p.k));
                } else {
                    if (matrix_.rows() < 3 || p.k < 2 ||
                        p.k > std::min<int>(kMaxSpectralK, static_cast<int>(matrix_.rows()))) {
                        throw Error(ErrorCode::kInfeasibleK, "spectral k out of range");
                    }
                    const auto& embedding = cached(embedding_, [&] { return spectral_embedding(matrix_); });
                    return cluster_embedding(matrix_, embedding, p.k, candidate.seed);
                }
            },
            candidate.params);
    }

private:
    template <class T>
    struct Slot {
        std::once_flag once;
        std::optional<T> value;
        std::exception_ptr error;
    };

    template <class T, class F>
    const T& cached(Slot<T>& slot, F&& make) {
        std::call_once(slot.once, [&] {
            try {
                slot.value.emplace(make());
            } catch (...) {
                slot.error = std::current_exception();
            }
        });
        if (slot.error) std::rethrow_exception(slot.error);
        return *slot.value;
    }

    const EncodedMatrix& matrix_;
    const PairwiseDistances& distances_;
    std::array<Slot<Dendrogram>, 3> dendrograms_;
    Slot<SpectralEmbedding> embedding_;
};

struct Outcome {
    std::optional<ModelResult> result;
    std::string failure;
};

}  // namespace

RecommendationSet search(const DataTable& table, const FeatureSpec& spec, const EncodedMatrix& matrix,
                         std::span<const ModelCandidate> candidates, const GroundTruthLabels* truth,
                         const SearchOptions& options, std::uint64_t generation, std::stop_token stop) {
    if (candidates.empty()) throw Error(ErrorCode::kEmptySpace, "no candidate models");
    if (matrix.rows() == 0) throw Error(ErrorCode::kEmptySpace, "no rows to cluster");

    const PairwiseDistances distances(matrix);
    CandidateRunner runner(matrix, distances);
    const auto features = top_features(spec, matrix, table);
    const auto desired_k = options.constraints.desired_k;

    std::vector<Outcome> outcomes(candidates.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= candidates.size() || stop.stop_requested()) return;
            const auto& cand = candidates[i];
            try {
                auto assignment = runner.run(cand);
                if (static_cast<double>(assignment.noise_count()) >
                    kMaxNoiseFraction * static_cast<double>(assignment.labels.size())) {
                    outcomes[i].failure = "discarded: more than half the items are noise";
                    continue;
                }
                if (desired_k && assignment.n_clusters != *desired_k) {
                    outcomes[i].failure = "discarded: " + std::to_string(assignment.n_clusters) +
                                          " clusters instead of " + std::to_string(*desired_k);
                    continue;
                }
                ModelResult r;
                r.candidate = cand;
                r.metrics = evaluate(matrix, distances, assignment, truth);
                r.description = describe(assignment, features);
                r.assignment = std::move(assignment);
                outcomes[i].result = std::move(r);
            } catch (const std::exception& e) {
                outcomes[i].failure = e.what();
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, candidates.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (stop.stop_requested()) throw Error(ErrorCode::kCancelled, "search cancelled");

    RecommendationSet out;
    out.generation = generation;
    std::vector<ModelResult> results;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].result) {
            results.push_back(std::move(*outcomes[i].result));
        } else {
            out.failures.push_back({candidates[i].label(), outcomes[i].failure});
        }
    }
    if (results.empty()) {
        std::string why = "every candidate failed";
        for (const auto& f : out.failures) why += "; " + f.candidate + ": " + f.reason;
        throw Error(ErrorCode::kEmptySpace, why);
    }
    std::sort(results.begin(), results.end(), ranks_before);

    std::vector<std::vector<int>> seen;
    for (auto& r : results) {
        auto canon = canonical_labels(r.assignment.labels);
        if (std::find(seen.begin(), seen.end(), canon) != seen.end()) continue;
        seen.push_back(std::move(canon));
        r.feature_spec = spec;
        if (!out.current_shown) {
            out.current_shown = std::move(r);
        } else if (out.ranked.size() < options.top_f) {
            out.ranked.push_back(std::move(r));
        } else {
            break;
        }
    }
    if (truth) {
        out.mismatch = out.current_shown->metrics.homogeneity.value_or(0.0) < kMismatchThreshold;
    }
    return out;
}

RecommendationSet search_table(const DataTable& table, const FeatureSpec& spec,
                               const SearchOptions& options, std::uint64_t generation,
                               std::stop_token stop) {
    const auto matrix = apply_weights(spec, table);
    const auto candidates = enumerate_space(matrix.rows(), options.constraints, options.seed);
    return search(table, spec, matrix, candidates, nullptr, options, generation, stop);
}

RecommendationSet rerank_on_demonstration(const DataTable& table, const WorkingLayout& layout,
                                          const FeatureSpec& spec, const SearchOptions& options,
                                          std::uint64_t generation, std::stop_token stop) {
    if (layout.assigned_count() == 0) throw Error(ErrorCode::kNoLabels, "layout has no assigned items");
    const auto truth = derive_truth(layout);
    FeatureSpec used = spec;
    if (spec.mode == FeatureMode::kSelectKBest) used = select_k_best(table, spec.k_best, truth);

    const auto full = apply_weights(used, table);
    const auto active = layout.active_items();
    const auto matrix = active.size() == full.rows() ? full : full.select_items(active);
    const auto candidates = enumerate_space(matrix.rows(), options.constraints, options.seed);
    return search(table, used, matrix, candidates, &truth, options, generation, stop);
}

DemonstrationOp recommendation_op(const ModelResult& result) {
    return DemonstrationOp::load_recommendation(result.candidate.label(), result.assignment.clusters());
}

std::uint64_t RecommendationStore::next_generation() {
    std::lock_guard lock(mutex_);
    return ++requested_;
}

std::uint64_t RecommendationStore::requested() const {
    std::lock_guard lock(mutex_);
    return requested_;
}

bool RecommendationStore::publish(RecommendationSet recs) {
    std::lock_guard lock(mutex_);
    if (published_ && published_->generation >= recs.generation) return false;
    if (failure_ && failure_->first > recs.generation) return false;
    published_ = std::move(recs);
    failure_.reset();
    return true;
}

void RecommendationStore::publish_failure(std::uint64_t generation, std::string reason) {
    std::lock_guard lock(mutex_);
    if (published_ && published_->generation >= generation) return;
    failure_.emplace(generation, std::move(reason));
}

std::optional<RecommendationSet> RecommendationStore::latest() const {
    std::lock_guard lock(mutex_);
    if (!published_) return std::nullopt;
    auto copy = *published_;
    copy.stale = copy.generation < requested_;
    return copy;
}

std::optional<std::pair<std::uint64_t, std::string>> RecommendationStore::failure() const {
    std::lock_guard lock(mutex_);
    return failure_;
}

}  // namespace democlust
