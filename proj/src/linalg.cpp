#include "laxforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace laxforge {

template <typename T>
LuDecomposition<T> lu_decompose(const Matrix<T>& m) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, "LU of " + m.shape());
    const std::size_t n = m.rows();
    LuDecomposition<T> lu{m, std::vector<std::size_t>(n), 1, false};
    auto& a = lu.packed;
    std::iota(lu.pivots.begin(), lu.pivots.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(lu.pivots[k], lu.pivots[piv]);
            lu.permutation_sign = -lu.permutation_sign;
        }
        if (a(k, k) == T{}) {
            lu.singular = true;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const T f = a(i, k);
            if (f == T{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return lu;
}

template <typename T>
T determinant(const Matrix<T>& m) {
    const auto lu = lu_decompose(m);
    if (lu.singular) return T{};
    T det = static_cast<T>(static_cast<double>(lu.permutation_sign));
    for (std::size_t i = 0; i < m.rows(); ++i) det *= lu.packed(i, i);
    return det;
}

double singular_threshold(double norm_inf_value, std::size_t dim, double tol) {
    return tol * std::pow(norm_inf_value, static_cast<double>(dim));
}

template <typename T>
bool is_numerically_singular(const Matrix<T>& m, double tol) {
    const double det = std::abs(determinant(m));
    return !(det > singular_threshold(norm_inf(m), m.rows(), tol));
}

namespace {

template <typename T>
std::vector<T> lu_solve(const LuDecomposition<T>& lu, std::span<const T> b) {
    const std::size_t n = lu.packed.rows();
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[lu.pivots[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu.packed(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu.packed(ii, j) * x[j];
        x[ii] /= lu.packed(ii, ii);
    }
    return x;
}

}  // namespace

template <typename T>
Matrix<T> inverse(const Matrix<T>& m, double tol) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, "inverse of " + m.shape());
    const auto lu = lu_decompose(m);
    T det = static_cast<T>(static_cast<double>(lu.permutation_sign));
    for (std::size_t i = 0; i < m.rows(); ++i) det *= lu.packed(i, i);
    if (lu.singular || !(std::abs(det) > singular_threshold(norm_inf(m), m.rows(), tol))) {
        throw Error(ErrorKind::Singular, "matrix is numerically singular (|det| = " +
                                             std::to_string(std::abs(det)) + ")");
    }
    const std::size_t n = m.rows();
    Matrix<T> inv(n, n);
    std::vector<T> e(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), T{});
        e[j] = T{1};
        inv.set_col(j, lu_solve(lu, std::span<const T>(e)));
    }
    return inv;
}

template <typename T>
std::vector<T> solve(const Matrix<T>& m, std::span<const T> b) {
    if (!m.is_square() || b.size() != m.rows()) throw Error(ErrorKind::DimensionMismatch, "solve");
    const auto lu = lu_decompose(m);
    if (lu.singular) throw Error(ErrorKind::Singular, "solve: zero pivot");
    return lu_solve(lu, b);
}

template LuDecomposition<double> lu_decompose(const RealMatrix&);
template LuDecomposition<cplx> lu_decompose(const ComplexMatrix&);
template double determinant(const RealMatrix&);
template cplx determinant(const ComplexMatrix&);
template bool is_numerically_singular(const RealMatrix&, double);
template bool is_numerically_singular(const ComplexMatrix&, double);
template RealMatrix inverse(const RealMatrix&, double);
template ComplexMatrix inverse(const ComplexMatrix&, double);
template std::vector<double> solve(const RealMatrix&, std::span<const double>);
template std::vector<cplx> solve(const ComplexMatrix&, std::span<const cplx>);

Svd svd(const ComplexMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    ComplexMatrix work = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int kMaxSweeps = 80;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0;
                double beta = 0.0;
                cplx gamma{};
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += std::norm(work(i, p));
                    beta += std::norm(work(i, q));
                    gamma += std::conj(work(i, p)) * work(i, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                // Rotate column q by the phase of gamma, then a real Jacobi rotation.
                const cplx phase = std::conj(gamma) / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const cplx xp = work(i, p);
                    const cplx xq = work(i, q) * phase;
                    work(i, p) = c * xp - s * xq;
                    work(i, q) = s * xp + c * xq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx xp = v(i, p);
                    const cplx xq = v(i, q) * phase;
                    v(i, p) = c * xp - s * xq;
                    v(i, q) = s * xp + c * xq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::norm(work(i, j));
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    Svd out{std::vector<double>(n), ComplexMatrix(m, n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        out.singular_values[k] = sigma[j];
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
        if (sigma[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, k) = work(i, j) / sigma[j];
        }
    }
    return out;
}

std::vector<ComplexVector> null_space(const ComplexMatrix& a, double rel_tol, double scale) {
    const Svd d = svd(a);
    const double smax = d.singular_values.empty() ? 0.0 : d.singular_values.front();
    const double ref = scale > 0.0 ? scale : std::max(smax, 1.0);
    std::vector<ComplexVector> basis;
    for (std::size_t k = 0; k < d.singular_values.size(); ++k) {
        if (d.singular_values[k] <= rel_tol * ref) basis.push_back(d.v.col(k));
    }
    return basis;
}

std::size_t numerical_rank(const ComplexMatrix& a, double rel_tol) {
    const Svd d = svd(a);
    if (d.singular_values.empty() || d.singular_values.front() == 0.0) return 0;
    const double cut = rel_tol * d.singular_values.front();
    return static_cast<std::size_t>(std::count_if(d.singular_values.begin(), d.singular_values.end(),
                                                  [cut](double s) { return s > cut; }));
}

double condition_number(const ComplexMatrix& a) {
    const Svd d = svd(a);
    if (d.singular_values.empty()) return 0.0;
    const double smin = d.singular_values.back();
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return d.singular_values.front() / smin;
}

ComplexMatrix stack_rows(std::span<const ComplexVector> rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    ComplexMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw Error(ErrorKind::DimensionMismatch, "stack_rows");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

}  // namespace laxforge
