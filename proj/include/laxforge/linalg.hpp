#pragma once

#include <vector>

#include "laxforge/matrix.hpp"

namespace laxforge {

inline constexpr double kDefaultSingularTol = 1e-12;

/// LU factorization with partial pivoting, P·A = L·U packed into one matrix.
template <typename T>
struct LuDecomposition {
    Matrix<T> packed;
    std::vector<std::size_t> pivots;
    int permutation_sign = 1;
    bool singular = false;  // an exactly zero pivot was met
};

template <typename T>
LuDecomposition<T> lu_decompose(const Matrix<T>& m);

/// Determinant via LU with partial pivoting; returns 0 for singular input.
template <typename T>
T determinant(const Matrix<T>& m);

/// Threshold below which |det m| is treated as zero: tol · ‖m‖∞^dim. Scales
/// homogeneously with m, so rescaling the input never flips the verdict.
double singular_threshold(double norm_inf_value, std::size_t dim, double tol);

template <typename T>
bool is_numerically_singular(const Matrix<T>& m, double tol = kDefaultSingularTol);

/// Inverse via LU; throws Singular when |det m| falls under singular_threshold.
template <typename T>
Matrix<T> inverse(const Matrix<T>& m, double tol = kDefaultSingularTol);

/// Solves m·x = b (square m); throws Singular on a zero pivot.
template <typename T>
std::vector<T> solve(const Matrix<T>& m, std::span<const T> b);

/// Thin SVD by one-sided Jacobi: a = U·diag(s)·Vᴴ with singular values
/// sorted descending.
struct Svd {
    std::vector<double> singular_values;
    ComplexMatrix u;
    ComplexMatrix v;
};

Svd svd(const ComplexMatrix& a);

/// Orthonormal basis (as columns) of the right null space of a: right singular
/// vectors whose singular value is at most rel_tol·scale, where scale defaults
/// to max(σ_max, 1).
std::vector<ComplexVector> null_space(const ComplexMatrix& a, double rel_tol, double scale = -1.0);

/// Number of singular values above rel_tol·σ_max.
std::size_t numerical_rank(const ComplexMatrix& a, double rel_tol);

/// σ_max / σ_min (infinity when singular).
double condition_number(const ComplexMatrix& a);

/// Rows of a matrix from a list of vectors of equal length.
ComplexMatrix stack_rows(std::span<const ComplexVector> rows);

}  // namespace laxforge
