#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "democlust/encoding.hpp"

namespace democlust {

/// Dense symmetric table of Euclidean distances between matrix rows.
class PairwiseDistances {
public:
    explicit PairwiseDistances(const EncodedMatrix& matrix);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {d_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Distance from every row to its k-th nearest other row. With fewer than
/// k other rows, the farthest one is used.
std::vector<double> kth_neighbor_distances(const PairwiseDistances& distances, std::size_t k);

/// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double q);

}  // namespace democlust
