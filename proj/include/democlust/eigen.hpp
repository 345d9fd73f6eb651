#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "democlust/matrix.hpp"

namespace democlust {

/// Eigenpairs of a symmetric operator. `values` ascending; column j of
/// `vectors` is the unit eigenvector of values[j].
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
};

struct JacobiOptions {
    int max_sweeps = 100;
    /// converged when off-diagonal Frobenius norm <= tolerance * ||A||_F
    double tolerance = 1e-10;
};

/// Full decomposition by cyclic Jacobi rotations. Throws NumericFailure
/// carrying the remaining off-diagonal norm if the sweep cap is hit.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, const JacobiOptions& options = {});

/// Full decomposition of a symmetric tridiagonal matrix (implicit QL).
/// `offdiag[i]` couples rows i and i+1.
EigenDecomposition tridiagonal_eigen(std::vector<double> diag, std::vector<double> offdiag);

struct LanczosOptions {
    double tolerance = 1e-9;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

/// y = A x for a symmetric n x n operator.
using SymmetricOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

/**
 * The `count` largest eigenpairs of a symmetric operator by Lanczos with full
 * reorthogonalization. Invariant subspaces are handled by restarting with a
 * fresh orthogonal vector, so repeated eigenvalues are found. Returned values
 * are ascending. Throws NumericFailure if the Ritz residuals have not dropped
 * below tolerance * ||A|| once the Krylov space spans R^n.
 */
EigenDecomposition lanczos_largest(const SymmetricOperator& op, std::size_t n, std::size_t count,
                                   const LanczosOptions& options = {});

/// Max over columns of ||A v - lambda v||.
double eigen_residual(const Matrix& symmetric, const EigenDecomposition& eig);

}  // namespace democlust
