#include "democlust/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "democlust/error.hpp"

namespace democlust {

namespace {

EigenDecomposition sorted(std::vector<double> values, const Matrix& vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(vectors.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = values[order[j]];
        for (std::size_t r = 0; r < vectors.rows(); ++r) out.vectors(r, j) = vectors(r, order[j]);
    }
    return out;
}

// Fix the sign of each eigenvector so its largest-magnitude entry is positive.
void canonical_signs(Matrix& vectors) {
    for (std::size_t j = 0; j < vectors.cols(); ++j) {
        std::size_t best = 0;
        double mag = -1.0;
        for (std::size_t r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, j)) > mag + 1e-12) {
                mag = std::abs(vectors(r, j));
                best = r;
            }
        }
        if (vectors.rows() > 0 && vectors(best, j) < 0.0) {
            for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, j) = -vectors(r, j);
        }
    }
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric, const JacobiOptions& options) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw Error(ErrorCode::kInvalidArgument, "matrix is not square");
    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);

    double fro2 = 0.0;
    for (double x : a.data()) fro2 += x * x;
    const double threshold = options.tolerance * std::sqrt(fro2);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        }
        return std::sqrt(2.0 * s);
    };

    double off = off_norm();
    int sweep = 0;
    while (off > threshold) {
        if (sweep == options.max_sweeps) {
            throw NumericFailure("Jacobi eigensolver did not converge", off);
        }
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    const double np = c * akp - s * akq;
                    const double nq = s * akp + c * akq;
                    a(k, p) = np;
                    a(p, k) = np;
                    a(k, q) = nq;
                    a(q, k) = nq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = off_norm();
    }

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    auto out = sorted(std::move(values), v);
    canonical_signs(out.vectors);
    return out;
}

EigenDecomposition tridiagonal_eigen(std::vector<double> d, std::vector<double> offdiag) {
    const std::size_t n = d.size();
    if (n == 0) return {};
    if (offdiag.size() + 1 != n) {
        throw Error(ErrorCode::kInvalidArgument, "tridiagonal shape mismatch");
    }
    std::vector<double> e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    Matrix v = Matrix::identity(n);

    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t max_iter = 60 * n + 60;
    std::size_t total_iter = 0;
    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m == n) m = n - 1;
        if (m > l) {
            do {
                if (++total_iter > max_iter) {
                    throw NumericFailure("tridiagonal QL did not converge", std::abs(e[l]));
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
    return sorted(std::move(d), v);
}

namespace {

struct RitzResult {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // unit, matching values
    double op_norm = 0.0;
};

// Top `count` Ritz pairs of `op` restricted to the orthogonal complement of
// `locked`.
RitzResult lanczos_core(const SymmetricOperator& op, std::size_t n, std::size_t count,
                        const std::vector<std::vector<double>>& locked, double tolerance,
                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const std::size_t dim = n - locked.size();

    std::vector<std::vector<double>> basis;
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples basis j and j+1
    double op_norm = 0.0;

    auto project_out = [&](std::vector<double>& w, const std::vector<std::vector<double>>& set) {
        for (const auto& q : set) {
            const double h = dot(q, w);
            for (std::size_t i = 0; i < n; ++i) w[i] -= h * q[i];
        }
    };
    auto orthogonalize = [&](std::vector<double>& w) {
        for (int pass = 0; pass < 2; ++pass) {
            project_out(w, locked);
            project_out(w, basis);
        }
    };
    auto fresh_vector = [&]() -> std::vector<double> {
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<double> w(n);
            for (auto& x : w) x = unif(rng);
            orthogonalize(w);
            const double norm = std::sqrt(dot(w, w));
            if (norm > 1e-8) {
                for (auto& x : w) x /= norm;
                return w;
            }
        }
        return {};
    };

    basis.push_back(fresh_vector());
    if (basis.back().empty()) throw NumericFailure("Lanczos could not build a start vector", 0.0);
    std::vector<double> w(n);
    EigenDecomposition ritz;

    const std::size_t check_every = 10;
    while (true) {
        const std::size_t j = basis.size() - 1;
        op(basis[j], w);
        const double a = dot(basis[j], w);
        alpha.push_back(a);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] -= a * basis[j][i];
            if (j > 0) w[i] -= beta[j - 1] * basis[j - 1][i];
        }
        orthogonalize(w);
        const double b = std::sqrt(dot(w, w));
        op_norm = std::max(op_norm, std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0));
        const double scale = std::max(op_norm, 1e-300);

        const std::size_t m = basis.size();
        const bool full = m == dim;
        const bool breakdown = b <= 1e-10 * scale;
        if (full || (m >= count && (m % check_every == 0 || breakdown))) {
            ritz = tridiagonal_eigen(alpha, std::vector<double>(beta.begin(), beta.end()));
            double worst = 0.0;
            for (std::size_t t = 0; t < count; ++t) {
                worst = std::max(worst, std::abs(b * ritz.vectors(m - 1, m - 1 - t)));
            }
            if (full || worst <= tolerance * scale) break;
        }

        if (breakdown) {
            auto q = fresh_vector();
            if (q.empty()) {
                ritz = tridiagonal_eigen(alpha, std::vector<double>(beta.begin(), beta.end()));
                break;
            }
            beta.push_back(0.0);
            basis.push_back(std::move(q));
        } else {
            beta.push_back(b);
            std::vector<double> q(n);
            for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
            basis.push_back(std::move(q));
        }
    }

    const std::size_t m = basis.size();
    RitzResult out;
    out.op_norm = op_norm;
    const std::size_t take = std::min(count, m);
    for (std::size_t t = 0; t < take; ++t) {
        const std::size_t col = m - take + t;
        std::vector<double> v(n, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double z = ritz.vectors(k, col);
            if (z == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) v[i] += z * basis[k][i];
        }
        const double norm = std::sqrt(dot(v, v));
        for (auto& x : v) x /= norm;
        out.values.push_back(ritz.values[col]);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

}  // namespace

EigenDecomposition lanczos_largest(const SymmetricOperator& op, std::size_t n, std::size_t count,
                                   const LanczosOptions& options) {
    if (count == 0 || count > n) {
        throw Error(ErrorCode::kInvalidArgument, "invalid eigenpair count");
    }
    std::mt19937_64 rng(options.seed);

    auto found = lanczos_core(op, n, count, {}, options.tolerance, rng);
    double op_norm = found.op_norm;

    // A single Krylov sequence sees one copy of a repeated eigenvalue. Check the
    // deflated complement for a larger eigenvalue and swap it in until none is left.
    while (found.vectors.size() < n) {
        auto extra = lanczos_core(op, n, 1, found.vectors, options.tolerance, rng);
        op_norm = std::max(op_norm, extra.op_norm);
        if (extra.values.empty() ||
            extra.values[0] <= found.values.front() + options.tolerance * std::max(op_norm, 1.0)) {
            break;
        }
        found.values.front() = extra.values[0];
        found.vectors.front() = std::move(extra.vectors[0]);
        std::vector<std::size_t> order(found.values.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return found.values[a] < found.values[b];
        });
        RitzResult reordered;
        for (auto i : order) {
            reordered.values.push_back(found.values[i]);
            reordered.vectors.push_back(std::move(found.vectors[i]));
        }
        reordered.op_norm = op_norm;
        found = std::move(reordered);
    }

    EigenDecomposition out;
    out.values = found.values;
    out.vectors = Matrix(n, found.values.size());
    double residual = 0.0;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < found.values.size(); ++t) {
        const auto& x = found.vectors[t];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, t) = x[i];
        op(x, y);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = y[i] - out.values[t] * x[i];
            r2 += d * d;
        }
        residual = std::max(residual, std::sqrt(r2));
    }
    if (residual > std::max(options.tolerance, 1e-6) * std::max(op_norm, 1.0)) {
        throw NumericFailure("Lanczos eigensolver did not converge", residual);
    }
    canonical_signs(out.vectors);
    return out;
}

double eigen_residual(const Matrix& a, const EigenDecomposition& eig) {
    double worst = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * eig.vectors(k, j);
            const double d = s - eig.values[j] * eig.vectors(i, j);
            r2 += d * d;
        }
        worst = std::max(worst, std::sqrt(r2));
    }
    return worst;
}

}  // namespace democlust
