#include "democlust/distances.hpp"

#include <algorithm>
#include <cmath>

#include "democlust/error.hpp"

namespace democlust {

PairwiseDistances::PairwiseDistances(const EncodedMatrix& matrix)
    : n_(matrix.rows()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
        const auto xi = matrix.row(i);
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = euclidean_distance(xi, matrix.row(j));
            d_[i * n_ + j] = d;
            d_[j * n_ + i] = d;
        }
    }
}

std::vector<double> kth_neighbor_distances(const PairwiseDistances& distances, std::size_t k) {
    const std::size_t n = distances.size();
    std::vector<double> out(n, 0.0);
    if (n < 2 || k == 0) return out;
    const std::size_t kk = std::min(k, n - 1);
    std::vector<double> buf;
    for (std::size_t i = 0; i < n; ++i) {
        buf.clear();
        const auto row = distances.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) buf.push_back(row[j]);
        }
        std::nth_element(buf.begin(), buf.begin() + (kk - 1), buf.end());
        out[i] = buf[kk - 1];
    }
    return out;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace democlust
