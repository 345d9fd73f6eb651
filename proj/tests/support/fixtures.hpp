#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "democlust/encoding.hpp"
#include "democlust/matrix.hpp"

namespace fixtures {

struct Blobs {
    democlust::Matrix points;
    std::vector<int> labels;
};

/// `k` isotropic Gaussian blobs in `d` dimensions whose centres are pairwise
/// `separation` apart (scaled unit vectors; needs k <= d).
inline Blobs gaussian_blobs(std::size_t n, std::size_t d, int k, double sigma, double separation,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Blobs b;
    b.points = democlust::Matrix(n, d);
    const double scale = separation / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % static_cast<std::size_t>(k));
        b.labels.push_back(c);
        for (std::size_t j = 0; j < d; ++j) {
            b.points(i, j) = (static_cast<int>(j) == c ? scale : 0.0) + noise(rng);
        }
    }
    return b;
}

inline democlust::Matrix uniform_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    democlust::Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) m(i, j) = u(rng);
    }
    return m;
}

inline std::string to_csv(const democlust::Matrix& m, const std::vector<int>* labels = nullptr) {
    std::string out;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j);
    }
    if (labels) out += ",planted";
    out += '\n';
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out += buf;
        }
        if (labels) out += ",g" + std::to_string((*labels)[i]);
        out += '\n';
    }
    return out;
}

}  // namespace fixtures
