#include <algorithm>
#include <cmath>

#include "democlust/engines.hpp"
#include "democlust/error.hpp"

namespace democlust {

namespace {

// D^-1/2 W D^-1/2 for the RBF affinity with unit self-affinity.
Matrix normalized_affinity(const EncodedMatrix& matrix) {
    const std::size_t n = matrix.rows();
    const double gamma = rbf_gamma(matrix);
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(-gamma * squared_distance(matrix.row(i), matrix.row(j)));
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (double v : w.row(i)) deg += v;
        inv_sqrt[i] = 1.0 / std::sqrt(deg);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto row = w.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] *= inv_sqrt[i] * inv_sqrt[j];
    }
    return w;
}

}  // namespace

double rbf_gamma(const EncodedMatrix& matrix) {
    std::size_t active = 0;
    for (std::size_t j = 0; j < matrix.dims(); ++j) {
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
            if (matrix.values()(i, j) != 0.0) {
                ++active;
                break;
            }
        }
    }
    return active == 0 ? 1.0 : 1.0 / static_cast<double>(active);
}

Matrix normalized_laplacian(const EncodedMatrix& matrix) {
    Matrix l = normalized_affinity(matrix);
    for (auto& v : l.data()) v = -v;
    for (std::size_t i = 0; i < l.rows(); ++i) l(i, i) += 1.0;
    return l;
}

SpectralEmbedding spectral_embedding(const EncodedMatrix& matrix) {
    const std::size_t n = matrix.rows();
    const std::size_t count = std::min<std::size_t>(kMaxSpectralK, n);
    SpectralEmbedding out;
    if (n <= kJacobiMaxRows) {
        const auto eig = jacobi_eigen(normalized_laplacian(matrix));
        out.eigenvalues.assign(eig.values.begin(), eig.values.begin() + count);
        out.eigenvectors = Matrix(n, count);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < count; ++j) out.eigenvectors(i, j) = eig.vectors(i, j);
        }
        return out;
    }

    // Smallest Laplacian eigenvalues are 1 - (largest of the normalized affinity).
    const Matrix m = normalized_affinity(matrix);
    const SymmetricOperator op = [&](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < n; ++i) y[i] = dot(m.row(i), x);
    };
    const auto eig = lanczos_largest(op, n, count);
    out.eigenvalues.resize(count);
    out.eigenvectors = Matrix(n, count);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t src = count - 1 - j;
        out.eigenvalues[j] = 1.0 - eig.values[src];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = eig.vectors(i, src);
    }
    return out;
}

ClusterAssignment cluster_embedding(const EncodedMatrix& matrix, const SpectralEmbedding& embedding,
                                    int k, std::uint64_t seed) {
    const std::size_t n = matrix.rows();
    const auto uk = static_cast<std::size_t>(k);
    if (uk > embedding.eigenvectors.cols()) {
        throw Error(ErrorCode::kInfeasibleK, "embedding has too few eigenvectors for k=" + std::to_string(k));
    }
    Matrix u(n, uk);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t j = 0; j < uk; ++j) norm += embedding.eigenvectors(i, j) * embedding.eigenvectors(i, j);
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < uk; ++j) {
            u(i, j) = norm > 0.0 ? embedding.eigenvectors(i, j) / norm : 0.0;
        }
    }
    const auto run = run_kmeans(EncodedMatrix::from_values(std::move(u)), k, 300, seed, 5);
    return make_assignment(matrix, run.assignment.labels);
}

ClusterAssignment run_spectral(const EncodedMatrix& matrix, int k, std::uint64_t seed) {
    const std::size_t n = matrix.rows();
    if (n < 3) throw Error(ErrorCode::kInfeasibleK, "spectral clustering needs at least 3 rows");
    const std::size_t cap = std::min<std::size_t>(n, kMaxSpectralK);
    if (k < 2 || static_cast<std::size_t>(k) > cap) {
        throw Error(ErrorCode::kInfeasibleK,
                    "spectral needs 2 <= k <= " + std::to_string(cap) + ", got " + std::to_string(k));
    }
    return cluster_embedding(matrix, spectral_embedding(matrix), k, seed);
}

}  // namespace democlust
