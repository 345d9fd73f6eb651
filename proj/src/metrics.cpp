#include "democlust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "democlust/error.hpp"

namespace democlust {

int GroundTruthLabels::m() const {
    std::set<int> classes;
    for (const auto& [item, c] : labels) classes.insert(c);
    return static_cast<int>(classes.size());
}

namespace {

// Contingency table of dense-coded labels.
struct Contingency {
    std::size_t n = 0;
    std::vector<std::size_t> rows;  // pred cluster totals
    std::vector<std::size_t> cols;  // truth class totals
    std::vector<std::size_t> cells; // rows.size() x cols.size()

    std::size_t cell(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
};

std::vector<std::size_t> dense_codes(std::span<const int> labels, std::size_t& count) {
    std::vector<int> uniq(labels.begin(), labels.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), labels[i]) - uniq.begin());
    }
    count = uniq.size();
    return out;
}

Contingency contingency(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) {
        throw Error(ErrorCode::kInvalidArgument, "label vectors differ in length");
    }
    if (pred.empty()) throw Error(ErrorCode::kUndefinedMetric, "no labelled items to compare");
    Contingency t;
    t.n = pred.size();
    std::size_t kp = 0, kt = 0;
    const auto p = dense_codes(pred, kp);
    const auto c = dense_codes(truth, kt);
    t.rows.assign(kp, 0);
    t.cols.assign(kt, 0);
    t.cells.assign(kp * kt, 0);
    for (std::size_t i = 0; i < t.n; ++i) {
        ++t.rows[p[i]];
        ++t.cols[c[i]];
        ++t.cells[p[i] * kt + c[i]];
    }
    return t;
}

double entropy(const std::vector<std::size_t>& counts, std::size_t n) {
    double h = 0.0;
    const double dn = static_cast<double>(n);
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / dn;
        h -= p * std::log(p);
    }
    return h;
}

double pairs(std::size_t x) {
    return static_cast<double>(x) * static_cast<double>(x > 0 ? x - 1 : 0) / 2.0;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

// ------------------------------------------------------ internal validity

double silhouette(const PairwiseDistances& dist, std::span<const int> labels) {
    const std::size_t n = labels.size();
    if (dist.size() != n) throw Error(ErrorCode::kInvalidArgument, "distance table size mismatch");
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    const auto populated = std::count_if(sizes.begin(), sizes.end(), [](auto s) { return s > 0; });
    if (populated < 2) {
        throw Error(ErrorCode::kUndefinedMetric, "silhouette needs at least two clusters");
    }

    std::vector<double> sums(static_cast<std::size_t>(k));
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int li = labels[i];
        if (li < 0) continue;
        ++counted;
        if (sizes[static_cast<std::size_t>(li)] == 1) continue;  // s(i) = 0
        std::fill(sums.begin(), sums.end(), 0.0);
        const auto row = dist.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (labels[j] >= 0) sums[static_cast<std::size_t>(labels[j])] += row[j];
        }
        const double a = sums[static_cast<std::size_t>(li)] /
                         static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (static_cast<int>(c) == li || sizes[c] == 0) continue;
            b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(counted);
}

double silhouette(const EncodedMatrix& matrix, const ClusterAssignment& assignment) {
    if (assignment.labels.size() != matrix.rows()) {
        throw Error(ErrorCode::kInvalidArgument, "assignment does not match matrix rows");
    }
    if (assignment.n_clusters < 2) {
        throw Error(ErrorCode::kUndefinedMetric, "silhouette needs at least two clusters");
    }
    return silhouette(PairwiseDistances(matrix), assignment.labels);
}

double davies_bouldin(const EncodedMatrix& matrix, const ClusterAssignment& assignment) {
    if (assignment.labels.size() != matrix.rows()) {
        throw Error(ErrorCode::kInvalidArgument, "assignment does not match matrix rows");
    }
    const auto fresh = make_assignment(matrix, assignment.labels);
    const auto k = static_cast<std::size_t>(fresh.n_clusters);
    if (k < 2) throw Error(ErrorCode::kUndefinedMetric, "Davies-Bouldin needs at least two clusters");

    std::vector<double> sigma(k, 0.0);
    const auto sizes = fresh.cluster_sizes();
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const int l = fresh.labels[r];
        if (l < 0) continue;
        sigma[static_cast<std::size_t>(l)] +=
            euclidean_distance(matrix.row(r), fresh.centroids.row(static_cast<std::size_t>(l)));
    }
    for (std::size_t c = 0; c < k; ++c) sigma[c] /= static_cast<double>(sizes[c]);

    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const double gap = euclidean_distance(fresh.centroids.row(i), fresh.centroids.row(j));
            const double ratio =
                gap > 0.0 ? (sigma[i] + sigma[j]) / gap : std::numeric_limits<double>::infinity();
            worst = std::max(worst, ratio);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

// ------------------------------------------------------------- agreement

double homogeneity(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency(pred, truth);
    const double hc = entropy(t.cols, t.n);
    if (hc == 0.0) return 1.0;
    // H(C|K) = -sum n_kc/N log(n_kc / n_k)
    double hck = 0.0;
    const double dn = static_cast<double>(t.n);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.cols.size(); ++c) {
            const auto v = t.cell(r, c);
            if (v == 0) continue;
            hck -= static_cast<double>(v) / dn *
                   std::log(static_cast<double>(v) / static_cast<double>(t.rows[r]));
        }
    }
    return clamp01(1.0 - hck / hc);
}

double adjusted_rand(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency(pred, truth);
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (auto v : t.cells) sum_cells += pairs(v);
    for (auto v : t.rows) sum_rows += pairs(v);
    for (auto v : t.cols) sum_cols += pairs(v);
    const double total = pairs(t.n);
    const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;
    return (sum_cells - expected) / denom;
}

double fowlkes_mallows(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency(pred, truth);
    double tp = 0.0, pred_pairs = 0.0, truth_pairs = 0.0;
    for (auto v : t.cells) tp += pairs(v);
    for (auto v : t.rows) pred_pairs += pairs(v);
    for (auto v : t.cols) truth_pairs += pairs(v);
    if (pred_pairs == 0.0 || truth_pairs == 0.0) return 0.0;
    return clamp01(tp / std::sqrt(pred_pairs * truth_pairs));
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const auto t = contingency(pred, truth);
    const double hc = entropy(t.cols, t.n);
    const double hk = entropy(t.rows, t.n);
    if (hc == 0.0 && hk == 0.0) return 1.0;
    if (hc == 0.0 || hk == 0.0) return 0.0;
    const double dn = static_cast<double>(t.n);
    double mi = 0.0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.cols.size(); ++c) {
            const auto v = t.cell(r, c);
            if (v == 0) continue;
            const double pv = static_cast<double>(v) / dn;
            mi += pv * std::log(static_cast<double>(v) * dn /
                                (static_cast<double>(t.rows[r]) * static_cast<double>(t.cols[c])));
        }
    }
    return clamp01(mi / std::sqrt(hc * hk));
}

LabelPairs labelled_pairs(const ClusterAssignment& pred, const GroundTruthLabels& truth) {
    LabelPairs out;
    for (std::size_t r = 0; r < pred.item_ids.size(); ++r) {
        auto it = truth.labels.find(pred.item_ids[r]);
        if (it == truth.labels.end()) continue;
        out.pred.push_back(pred.labels[r]);
        out.truth.push_back(it->second);
    }
    if (out.pred.empty()) {
        throw Error(ErrorCode::kUndefinedMetric, "no predicted item carries a ground-truth label");
    }
    return out;
}

double homogeneity(const ClusterAssignment& pred, const GroundTruthLabels& truth) {
    const auto p = labelled_pairs(pred, truth);
    return homogeneity(p.pred, p.truth);
}

double adjusted_rand(const ClusterAssignment& pred, const GroundTruthLabels& truth) {
    const auto p = labelled_pairs(pred, truth);
    return adjusted_rand(p.pred, p.truth);
}

double fowlkes_mallows(const ClusterAssignment& pred, const GroundTruthLabels& truth) {
    const auto p = labelled_pairs(pred, truth);
    return fowlkes_mallows(p.pred, p.truth);
}

double nmi(const ClusterAssignment& pred, const GroundTruthLabels& truth) {
    const auto p = labelled_pairs(pred, truth);
    return nmi(p.pred, p.truth);
}

// ----------------------------------------------------------------- score

double composite_score(std::optional<double> silhouette, std::optional<double> homogeneity,
                       double noise_fraction) {
    if (homogeneity) return clamp01(*homogeneity);
    if (silhouette) return clamp01((*silhouette * (1.0 - noise_fraction) + 1.0) / 2.0);
    return 0.0;
}

MetricBundle evaluate(const EncodedMatrix& matrix, const PairwiseDistances& distances,
                      const ClusterAssignment& assignment, const GroundTruthLabels* truth) {
    MetricBundle b;
    if (assignment.n_clusters >= 2) {
        b.silhouette = silhouette(distances, assignment.labels);
        b.davies_bouldin = davies_bouldin(matrix, assignment);
    }
    if (truth) {
        const auto p = labelled_pairs(assignment, *truth);
        b.homogeneity = homogeneity(p.pred, p.truth);
        b.ari = adjusted_rand(p.pred, p.truth);
        b.fowlkes_mallows = fowlkes_mallows(p.pred, p.truth);
        b.nmi = nmi(p.pred, p.truth);
    }
    const double noise = assignment.labels.empty()
                             ? 0.0
                             : static_cast<double>(assignment.noise_count()) /
                                   static_cast<double>(assignment.labels.size());
    b.score = composite_score(b.silhouette, b.homogeneity, noise);
    return b;
}

}  // namespace democlust
